import sys
import time


class Progress:
    """Simple, self deleting epoch progress bar"""

    def __init__(self, max_value, tick="—", length=40, stream=None):
        """Init the progress bar with the number of epochs"""
        self.max = max(int(max_value), 1)
        self.tick = tick
        self.length = length
        self.step = length / self.max
        self.stream = sys.stderr if stream is None else stream
        self.value = 0
        self.info = ""
        self.start = time.time()
        self.reset()

    def update(self, step=1, info=None):
        """Update progress, optionally with a short status like the current loss"""
        self.value = min(self.value + step, self.max)
        if info is not None:
            self.info = info
        s = int(round(self.step * self.value, 0))
        r = int(self.value / self.max * 100)
        t = time.time() - self.start
        self.stream.write(
            f"\r{r:3d}% ⋮{self.tick * s}{' ' * (self.length - s)}⋮ ({self.value}/{self.max}) {t:6.2f}s {self.info}"
        )
        self.stream.flush()

    def done(self):
        """Finalize the progress bar"""
        self.value = self.max
        self.update(0)
        self.stream.write("\n")

    def reset(self):
        """Reset the progress bar"""
        self.value = 0
        self.update(0)


class NoProgress:
    """Drop-in for Progress when no bar is wanted"""

    def update(self, step=1, info=None):
        ...

    def done(self):
        ...


def progress_bar(enabled, max_value):
    return Progress(max_value) if enabled else NoProgress()
