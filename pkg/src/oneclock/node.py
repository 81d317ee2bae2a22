"""Immutable syntax-tree base class with cached hashing.

Formula trees built by the synthesis procedures share subtrees heavily, so
hashing has to be memoised or dictionary lookups become exponential.
"""
from dataclasses import fields


class Node:
    __slots__ = ()

    def _values(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        if hash(self) != hash(other):
            return False
        return self._values() == other._values()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._values())
            object.__setattr__(self, "_hash", h)
        return h

    def children(self):
        return ()
