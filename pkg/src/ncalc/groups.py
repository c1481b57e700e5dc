"""Finite groups with hashable elements, multiplication written ``compose(a, b) = a*b``."""
from __future__ import annotations

import random
from abc import ABC, abstractmethod
from itertools import permutations
from typing import Any, Hashable


class GroupError(ValueError):
    pass


class GroupOps(ABC):
    kind: str

    @abstractmethod
    def identity(self) -> Hashable: ...

    @abstractmethod
    def compose(self, a, b) -> Hashable: ...

    @abstractmethod
    def invert(self, a) -> Hashable: ...

    @abstractmethod
    def parse(self, data: Any) -> Hashable:
        """Element from its serialized form; raises GroupError on a shape mismatch."""

    @abstractmethod
    def serialize(self, a) -> Any: ...

    @abstractmethod
    def random_element(self, rng: random.Random) -> Hashable: ...

    @abstractmethod
    def describe(self) -> dict: ...

    def eq(self, a, b) -> bool:
        return a == b

    def product(self, elements) -> Hashable:
        out = self.identity()
        for g in elements:
            out = self.compose(out, g)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupOps) and self.describe() == other.describe()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.describe().items())))


class SymmetricGroup(GroupOps):
    """S_k on ``0..k-1``; elements are image tuples, ``a*b`` applies ``a`` first."""

    kind = "symmetric"

    def __init__(self, degree: int):
        if degree < 1:
            raise GroupError("degree must be positive")
        self.degree = degree

    def identity(self):
        return tuple(range(self.degree))

    def compose(self, a, b):
        return tuple(b[i] for i in a)

    def invert(self, a):
        out = [0] * self.degree
        for i, j in enumerate(a):
            out[j] = i
        return tuple(out)

    def parse(self, data):
        if not isinstance(data, list) or sorted(data) != list(range(self.degree)):
            raise GroupError(f"{data!r} is not a permutation image array of degree {self.degree}")
        return tuple(data)

    def serialize(self, a):
        return list(a)

    def random_element(self, rng):
        p = list(range(self.degree))
        rng.shuffle(p)
        return tuple(p)

    def elements(self):
        return [tuple(p) for p in permutations(range(self.degree))]

    def describe(self):
        return {"kind": self.kind, "degree": self.degree}

    @staticmethod
    def cycle(degree: int, *cycles) -> tuple:
        """Image tuple of a product of disjoint cycles, e.g. ``cycle(3, (0, 1, 2))``."""
        img = list(range(degree))
        for c in cycles:
            for i, v in enumerate(c):
                img[v] = c[(i + 1) % len(c)]
        return tuple(img)


class CyclicGroup(GroupOps):
    kind = "cyclic"

    def __init__(self, modulus: int):
        if modulus < 1:
            raise GroupError("modulus must be positive")
        self.modulus = modulus

    def identity(self):
        return 0

    def compose(self, a, b):
        return (a + b) % self.modulus

    def invert(self, a):
        return (-a) % self.modulus

    def parse(self, data):
        if isinstance(data, bool) or not isinstance(data, int) or not 0 <= data < self.modulus:
            raise GroupError(f"{data!r} is not an element of Z_{self.modulus}")
        return data

    def serialize(self, a):
        return a

    def random_element(self, rng):
        return rng.randrange(self.modulus)

    def elements(self):
        return list(range(self.modulus))

    def describe(self):
        return {"kind": self.kind, "modulus": self.modulus}


class MatrixGroup(GroupOps):
    """GL(2, Z/p): invertible 2x2 matrices mod a prime, stored row-major."""

    kind = "matrix"

    def __init__(self, modulus: int):
        if modulus < 2 or any(modulus % q == 0 for q in range(2, int(modulus**0.5) + 1)):
            raise GroupError("matrix modulus must be prime")
        self.modulus = modulus

    def identity(self):
        return (1, 0, 0, 1)

    def compose(self, a, b):
        p = self.modulus
        return (
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        )

    def det(self, a) -> int:
        return (a[0] * a[3] - a[1] * a[2]) % self.modulus

    def invert(self, a):
        p = self.modulus
        inv = pow(self.det(a), -1, p)
        return ((a[3] * inv) % p, (-a[1] * inv) % p, (-a[2] * inv) % p, (a[0] * inv) % p)

    def parse(self, data):
        if (
            not isinstance(data, list)
            or len(data) != 4
            or not all(isinstance(v, int) and 0 <= v < self.modulus for v in data)
        ):
            raise GroupError(f"{data!r} is not a row-major 2x2 matrix mod {self.modulus}")
        a = tuple(data)
        if self.det(a) == 0:
            raise GroupError(f"{data!r} is singular mod {self.modulus}")
        return a

    def serialize(self, a):
        return list(a)

    def random_element(self, rng):
        while True:
            a = tuple(rng.randrange(self.modulus) for _ in range(4))
            if self.det(a):
                return a

    def describe(self):
        return {"kind": self.kind, "modulus": self.modulus}


def group_from_spec(spec: dict) -> GroupOps:
    kind = spec.get("kind")
    if kind == "symmetric":
        return SymmetricGroup(spec["degree"])
    if kind == "cyclic":
        return CyclicGroup(spec["modulus"])
    if kind == "matrix":
        return MatrixGroup(spec["modulus"])
    raise GroupError(f"unknown group kind {kind!r}")
