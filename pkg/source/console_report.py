import sys
import time


class ConsoleReport:
    """Timestamped event log and plain-text status tables on a text stream."""

    def __init__(self, stream=None):
        self.stream = stream if stream is not None else sys.stdout

    def log_message(self, message):
        """Print a [HH:MM:SS] timestamped line"""
        timestamp = time.strftime("%H:%M:%S")
        line = f"[{timestamp}] {message}"
        print(line, file=self.stream)

    def update_display(self, status):
        """Print a name: value status block"""
        width = max((len(name) for name in status), default=0) + 1
        for name, value in status.items():
            shown = value if value not in (None, "") else "N/A"
            print(f"{name + ':':<{width}} {shown}", file=self.stream)

    def print_table(self, headers, rows):
        """Print left-aligned columns under a dashed header rule"""
        cells = [[str(c) for c in row] for row in rows]
        widths = [len(h) for h in headers]
        for row in cells:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        print("  ".join(h.ljust(w) for h, w in zip(headers, widths)), file=self.stream)
        print("  ".join("-" * w for w in widths), file=self.stream)
        for row in cells:
            print("  ".join(c.ljust(w) for c, w in zip(row, widths)), file=self.stream)

    def drain(self, messages):
        """Log buffered messages from another component"""
        for message in messages:
            self.log_message(message)
