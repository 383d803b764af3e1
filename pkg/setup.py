from setuptools import setup, find_packages
import os

here = os.path.dirname(os.path.abspath(__file__))

with open(os.path.join(here, "README.md"), encoding="utf-8") as fd:
    LONG_DESCRIPTION = fd.read()

setup_args = {
    "name": "latent_graph",
    "version": "1.0.0",
    "description": "Learn a latent graph jointly with a GCN classifier, with denoising self-supervision and starved-edge analyses",
    "long_description": LONG_DESCRIPTION,
    "long_description_content_type": "text/markdown",
    "include_package_data": True,
    "python_requires": ">=3.8",
    "install_requires": [
        "numpy>=1.22",
        "scipy>=1.8",
        "scikit-learn>=1.1",
        "networkx>=2.8",
        "cachetools~=5.2",
    ],
    "extras_require": {
        "dev": {"pytest", "twine", "bumpversion", "black", "pylint"},
    },
    "packages": find_packages(exclude=["tests"]),
    "entry_points": {"console_scripts": ["lgl=latent_graph.cli:main"]},
    "zip_safe": False,
    "keywords": ["graph neural networks", "structure learning", "self-supervision", "semi-supervised"],
    "classifiers": [
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
}

setup(**setup_args)
