"""A small character scanner shared by the hand-written parsers."""
import re

from .core import Interval
from .errors import InputError

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_:^'#]*")
INTERVAL = re.compile(r"([\[(])\s*(\d+)\s*,\s*(\d+|inf)\s*([\])])")
INTEGER = re.compile(r"\d+")


class Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "#" and (self.pos == 0 or self.text[self.pos - 1] in "\n\r"):
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self.pos += 1
            else:
                break

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message, pos=None):
        line, col = self.where(pos)
        return InputError(message, line, col)

    def at_end(self):
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.accept(literal):
            found = self.text[self.pos:self.pos + 10] or "end of input"
            raise self.error(f"expected {literal!r}, found {found!r}")

    def peek_word(self):
        """The identifier at the cursor, without consuming it."""
        self.skip()
        m = IDENT.match(self.text, self.pos)
        return m.group(0) if m else None

    def accept_word(self, word: str) -> bool:
        if self.peek_word() == word:
            self.pos += len(word)
            return True
        return False

    def ident(self, what="identifier") -> str:
        self.skip()
        m = IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def integer(self) -> int:
        self.skip()
        m = INTEGER.match(self.text, self.pos)
        if not m:
            raise self.error("expected an integer")
        self.pos = m.end()
        return int(m.group(0))

    def interval(self) -> Interval:
        self.skip()
        m = INTERVAL.match(self.text, self.pos)
        if not m:
            raise self.error("expected an interval such as [1,2) or (0,inf)")
        start = self.pos
        self.pos = m.end()
        hi = None if m.group(3) == "inf" else int(m.group(3))
        try:
            return Interval(int(m.group(2)), m.group(1) == "[", hi, m.group(4) == "]")
        except InputError as exc:
            raise self.error(str(exc), start) from None

    def finish(self):
        if not self.at_end():
            raise self.error(f"unexpected trailing input {self.text[self.pos:self.pos + 10]!r}")
