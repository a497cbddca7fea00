import time
from collections import deque


class ThroughputCalc(object):
    """Rolling samples-per-second meter for long Monte-Carlo loops."""

    def __init__(self, buffer_len=1):
        self._start_tick = time.perf_counter()
        self._difftimes = deque(maxlen=buffer_len)
        self._counts = deque(maxlen=buffer_len)

    def get(self, count=1):
        current_tick = time.perf_counter()
        different_time = current_tick - self._start_tick
        self._start_tick = current_tick

        self._difftimes.append(different_time)
        self._counts.append(count)

        elapsed = sum(self._difftimes)
        if elapsed <= 0.0:
            return 0.0
        return round(sum(self._counts) / elapsed, 2)
