"""Compact matrix Lie algebras as orthonormal bases with structure constants.

Every algebra carries the scaled trace form ⟨X, Y⟩ = -s · Re tr(XY). Bases are
Gram-Schmidt orthonormalized under that form, so the gram matrix is the
identity and all duals and adjoints are plain transposes.
"""

from itertools import combinations
from typing import Any, List, Optional, Sequence, Tuple, Union

import catalogue
import numpy as np

from wnncheck.constants import TOL_STRUCT
from wnncheck.errors import ConfigError, Degenerate, DimensionMismatch, NotClosed
from wnncheck.types import CheckReport
from wnncheck.util import as_vector, freeze


class registry:
    algebras = catalogue.create("wnncheck", "algebras", entry_points=True)




class LieAlgebraBasis:
    """Orthonormal basis of a compact matrix Lie algebra.

    Structure constants are stored so that
    [e_i, e_j] = Σ_k c[i, j, k] e_k.
    """

    def __init__(
        self,
        name: str,
        basis: np.ndarray,
        structure_constants: np.ndarray,
        gram: np.ndarray,
        form_scale: float,
        labels: Optional[List[str]] = None,
        tol_struct: float = TOL_STRUCT,
    ):
        """Initialize a LieAlgebraBasis. Use `build_algebra` to construct
        one from matrices or a catalog id.

        Args:
            name (str): Algebra name
            basis (np.ndarray): (dim, d, d) stack of basis matrices
            structure_constants (np.ndarray): (dim, dim, dim) array c[i, j, k]
            gram (np.ndarray): Inner products of the basis matrices
            form_scale (float): Scale s of the trace form -s Re tr(XY)
            labels (List[str], optional): Names of the basis vectors
            tol_struct (float): Tolerance used for structural checks
        """
        self._name = name
        self._basis = freeze(basis)
        self._c = freeze(structure_constants)
        self._gram = freeze(gram)
        self._form_scale = float(form_scale)
        self._labels = labels or [f"e{i + 1}" for i in range(basis.shape[0])]
        self._tol_struct = tol_struct

    @property
    def name(self) -> str:
        return self._name

    @property
    def dim(self) -> int:
        return self._basis.shape[0]

    @property
    def matrix_size(self) -> int:
        return self._basis.shape[1]

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def structure_constants(self) -> np.ndarray:
        return self._c

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    @property
    def form_scale(self) -> float:
        return self._form_scale

    @property
    def labels(self) -> List[str]:
        return self._labels

    @property
    def tol_struct(self) -> float:
        return self._tol_struct

    def e(self, label: Union[str, int]) -> np.ndarray:
        """Coefficient vector of a basis element, by label or index"""
        idx = self._labels.index(label) if isinstance(label, str) else label
        v = np.zeros(self.dim)
        v[idx] = 1.0
        return v

    def inner_matrices(self, x: np.ndarray, y: np.ndarray) -> float:
        return trace_form(x, y, self._form_scale)

    def coordinates(self, mat: np.ndarray) -> np.ndarray:
        """Coefficients of a matrix in the orthonormal basis"""
        tr = np.einsum("ij,kji->k", mat, self._basis)
        return -self._form_scale * np.real(tr)

    def matrix(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = as_vector(coeffs, self.dim, "coefficients")
        return np.einsum("k,kij->ij", coeffs, self._basis)

    def bracket(self, a: Any, b: Any) -> np.ndarray:
        a = as_vector(a, self.dim, "a")
        b = as_vector(b, self.dim, "b")
        return np.einsum("i,j,ijk->k", a, b, self._c)

    def ad(self, a: Any) -> np.ndarray:
        """Matrix of ad(a) with ad(a)[:, j] = [a, e_j]"""
        a = as_vector(a, self.dim, "a")
        return np.einsum("i,ijk->kj", a, self._c)

    def inner(self, a: Any, b: Any) -> float:
        a = as_vector(a, self.dim, "a")
        b = as_vector(b, self.dim, "b")
        return float(a @ self._gram @ b)

    def __repr__(self) -> str:
        return f"LieAlgebraBasis({self._name}, dim={self.dim})"


class Subspace:
    """Linear subspace of an algebra spanned by gram-orthonormal
    coefficient vectors (stored as rows of `span`)."""

    def __init__(
        self,
        parent: LieAlgebraBasis,
        vectors: Union[np.ndarray, Sequence[Sequence[float]]],
        name: str = "",
    ):
        """Orthonormalize vectors into a Subspace of parent.

        Args:
            parent (LieAlgebraBasis): Algebra the subspace lives in
            vectors: Coefficient vectors spanning the subspace
            name (str): Display name such as "𝔮"

        Raises:
            DimensionMismatch: If vectors don't conform to the algebra
            Degenerate: If vectors are linearly dependent
        """
        arr = np.asarray(vectors, dtype=float)
        if arr.size == 0:
            arr = np.zeros((0, parent.dim))
        if arr.ndim != 2 or arr.shape[1] != parent.dim:
            raise DimensionMismatch(
                f"Subspace vectors must have {parent.dim} coefficients"
            )
        span = gram_schmidt(arr, parent.gram, drop_dependent=False)
        self._parent = parent
        self._span = freeze(span)
        self._name = name

    @property
    def parent(self) -> LieAlgebraBasis:
        return self._parent

    @property
    def span(self) -> np.ndarray:
        return self._span

    @property
    def rank(self) -> int:
        return self._span.shape[0]

    @property
    def name(self) -> str:
        return self._name

    @property
    def projector(self) -> np.ndarray:
        return self._span.T @ self._span @ self._parent.gram

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of the projection of x in the orthonormal span"""
        return self._span @ self._parent.gram @ x

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self._span

    def residual(self, x: np.ndarray) -> float:
        """Norm of the part of x orthogonal to the subspace"""
        rest = x - project(x, self)
        return float(np.sqrt(max(rest @ self._parent.gram @ rest, 0.0)))

    def contains(self, x: np.ndarray, tol: Optional[float] = None) -> bool:
        tol = self._parent.tol_struct if tol is None else tol
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def complement(self, *others: "Subspace", name: str = "") -> "Subspace":
        """Orthogonal complement of this subspace together with others,
        built by projecting the algebra basis and dropping dependent vectors."""
        parent = self._parent
        taken = np.vstack([self._span] + [o.span for o in others])
        proj = taken.T @ taken @ parent.gram
        candidates = np.eye(parent.dim) - proj.T
        span = gram_schmidt(candidates, parent.gram, drop_dependent=True)
        return Subspace(parent, span, name=name)

    def __repr__(self) -> str:
        return f"Subspace({self._name or 'unnamed'}, rank={self.rank})"


def trace_form(x: np.ndarray, y: np.ndarray, scale: float = 1.0) -> float:
    return float(-scale * np.real(np.trace(x @ y)))


def gram_schmidt(
    vectors: np.ndarray,
    gram: np.ndarray,
    drop_dependent: bool = False,
    tol: float = 1e-10,
) -> np.ndarray:
    """Modified Gram-Schmidt under the inner product given by gram.
    Vectors that are already orthonormal come back unchanged.

    Args:
        vectors (np.ndarray): Rows to orthonormalize, in order
        gram (np.ndarray): Gram matrix of the ambient inner product
        drop_dependent (bool): Skip (instead of raising on) dependent vectors
        tol (float): Norm below which a vector counts as dependent

    Raises:
        Degenerate: If a vector is dependent and drop_dependent is False

    Returns:
        np.ndarray: Orthonormal rows
    """
    out: List[np.ndarray] = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for u in out:
            w = w - (u @ gram @ w) * u
        norm_sq = float(w @ gram @ w)
        if norm_sq <= tol**2:
            if drop_dependent:
                continue
            raise Degenerate("Spanning vectors are linearly dependent")
        out.append(w / np.sqrt(norm_sq))
    if not out:
        return np.zeros((0, len(gram)))
    return np.vstack(out)


def build_algebra(
    spec: Union[str, Sequence[Any]],
    form_scale: float = 1.0,
    labels: Optional[List[str]] = None,
    name: Optional[str] = None,
    tol_struct: float = TOL_STRUCT,
) -> LieAlgebraBasis:
    """Build a validated LieAlgebraBasis.

    Args:
        spec (Union[str, Sequence]): Catalog id ("su2", "so4", "so5", "u1xu1", ...)
            or a list of square matrices closed under commutator
        form_scale (float): Scale s of the trace form, ignored for catalog ids
        labels (List[str], optional): Basis labels, ignored for catalog ids
        name (str, optional): Algebra name
        tol_struct (float): Structural tolerance

    Raises:
        NotClosed: If a commutator leaves the span
        Degenerate: If the trace form is not positive-definite on the span
        ConfigError: If the number of labels differs from the number of matrices

    Returns:
        LieAlgebraBasis: Orthonormal basis with structure constants
    """
    if isinstance(spec, str):
        factory = registry.algebras.get(spec)
        matrices, form_scale, labels = factory()
        name = name or spec
    else:
        matrices = [np.asarray(m) for m in spec]
        name = name or "custom"

    if not matrices:
        raise Degenerate("An algebra needs at least one basis matrix")
    stack = np.stack(matrices)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DimensionMismatch("Basis matrices must be square and of equal size")

    n = stack.shape[0]
    if labels is not None and len(labels) != n:
        raise ConfigError(f"Got {len(labels)} labels for {n} basis matrices")
    raw_gram = np.array(
        [[trace_form(a, b, form_scale) for b in stack] for a in stack]
    )
    raw_gram = 0.5 * (raw_gram + raw_gram.T)
    if np.linalg.eigvalsh(raw_gram).min() <= tol_struct:
        raise Degenerate(
            "Trace form is not positive-definite on the span (non-compact input?)"
        )

    coeffs = gram_schmidt(np.eye(n), raw_gram)
    basis = np.einsum("ij,jkl->ikl", coeffs, stack)
    gram = np.array([[trace_form(a, b, form_scale) for b in basis] for a in basis])

    c = np.zeros((n, n, n))
    for i, j in combinations(range(n), 2):
        comm = basis[i] @ basis[j] - basis[j] @ basis[i]
        coords = -form_scale * np.real(np.einsum("ij,kji->k", comm, basis))
        rebuilt = np.einsum("k,kij->ij", coords, basis)
        if np.abs(comm - rebuilt).max() > tol_struct:
            raise NotClosed(
                f"Commutator of basis elements {i} and {j} leaves the span"
            )
        c[i, j] = coords
        c[j, i] = -coords

    return LieAlgebraBasis(
        name, basis, c, gram, form_scale, labels=labels, tol_struct=tol_struct
    )


def bracket(alg: LieAlgebraBasis, a: Any, b: Any) -> np.ndarray:
    """Lie bracket of coefficient vectors a and b

    Raises:
        DimensionMismatch: If a or b don't conform to the algebra
    """
    return alg.bracket(a, b)


def project(x: Any, s: Subspace) -> np.ndarray:
    """Gram-orthogonal projection of x onto span(s)

    Raises:
        DimensionMismatch: If x doesn't conform to the algebra of s
    """
    x = as_vector(x, s.parent.dim, "x")
    return s.lift(s.coordinates(x))


def jacobi_residual(alg: LieAlgebraBasis) -> float:
    c = alg.structure_constants
    jac = (
        np.einsum("ijl,lkm->ijkm", c, c)
        + np.einsum("jkl,lim->ijkm", c, c)
        + np.einsum("kil,ljm->ijkm", c, c)
    )
    return float(np.abs(jac).max()) if jac.size else 0.0


def ad_skew_residual(alg: LieAlgebraBasis) -> float:
    """max |⟨[z,x],y⟩ + ⟨x,[z,y]⟩| over basis triples"""
    c = alg.structure_constants
    g = alg.gram
    first = np.einsum("zxk,ky->zxy", c, g)
    second = np.einsum("xk,zyk->zxy", g, c)
    return float(np.abs(first + second).max()) if c.size else 0.0


def commutator_residual(alg: LieAlgebraBasis) -> float:
    basis = alg.basis
    c = alg.structure_constants
    worst = 0.0
    for i in range(alg.dim):
        for j in range(alg.dim):
            comm = basis[i] @ basis[j] - basis[j] @ basis[i]
            rebuilt = np.einsum("k,kab->ab", c[i, j], basis)
            worst = max(worst, float(np.abs(comm - rebuilt).max()))
    return worst


def validate_structure(alg: LieAlgebraBasis) -> CheckReport:
    """Report Jacobi, ad-skewness and commutator-consistency residuals

    Args:
        alg (LieAlgebraBasis): Algebra to validate

    Returns:
        CheckReport: pass iff all residuals are within tol_struct
    """
    residuals = {
        "jacobi": jacobi_residual(alg),
        "ad_skew": ad_skew_residual(alg),
        "commutator": commutator_residual(alg),
        "gram_identity": float(np.abs(alg.gram - np.eye(alg.dim)).max()),
    }
    tol = alg.tol_struct
    c = alg.structure_constants
    return CheckReport.from_residuals(
        "validate_structure",
        residuals,
        {k: tol for k in residuals},
        statistics={
            "dim": float(alg.dim),
            "antisymmetry": float(np.abs(c + c.transpose(1, 0, 2)).max()),
            "min_gram_eigenvalue": float(np.linalg.eigvalsh(alg.gram).min()),
        },
    )


def elementary_so(n: int) -> Tuple[List[np.ndarray], List[str]]:
    """Elementary antisymmetric matrices L_ij = e_i e_jᵀ - e_j e_iᵀ, i < j,
    ordered lexicographically (L12, L13, ..., L(n-1)n)."""
    mats, labels = [], []
    for i, j in combinations(range(n), 2):
        m = np.zeros((n, n))
        m[i, j] = 1.0
        m[j, i] = -1.0
        mats.append(m)
        labels.append(f"L{i + 1}{j + 1}")
    return mats, labels


def sym0_basis() -> List[np.ndarray]:
    """Frobenius-orthonormal basis of symmetric traceless 3x3 matrices,
    the fixed identification of that space with R^5."""
    s2, s6 = np.sqrt(2.0), np.sqrt(6.0)
    b = [np.zeros((3, 3)) for _ in range(5)]
    b[0][0, 1] = b[0][1, 0] = 1 / s2
    b[1][0, 2] = b[1][2, 0] = 1 / s2
    b[2][1, 2] = b[2][2, 1] = 1 / s2
    b[3][0, 0], b[3][1, 1] = 1 / s2, -1 / s2
    b[4][0, 0], b[4][1, 1], b[4][2, 2] = 1 / s6, 1 / s6, -2 / s6
    return b


def berger_generators() -> List[np.ndarray]:
    """The three 5x5 generators of so(3) acting by commutator on
    symmetric traceless 3x3 matrices (the irreducible so(3) ⊂ so(5)).
    Returned in the order ρ(L12), ρ(L13), ρ(L23)."""
    sym = sym0_basis()
    gens = []
    for a in elementary_so(3)[0]:
        rho = np.zeros((5, 5))
        for i, bi in enumerate(sym):
            for j, bj in enumerate(sym):
                rho[i, j] = np.trace(bi @ (a @ bj - bj @ a))
        gens.append(rho)
    return gens


@registry.algebras.register("su2")
def su2() -> Tuple[List[np.ndarray], float, List[str]]:
    # E_k = -(i/2) σ_k, so [E1, E2] = E3 cyclically; scale 2 makes them orthonormal
    sigma = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    return [-0.5j * s for s in sigma], 2.0, ["E1", "E2", "E3"]


@registry.algebras.register("u1xu1")
def u1xu1() -> Tuple[List[np.ndarray], float, List[str]]:
    e1 = np.diag([1j, 0]).astype(complex)
    e2 = np.diag([0, 1j]).astype(complex)
    return [e1, e2], 1.0, ["e1", "e2"]


@registry.algebras.register("so3")
def so3() -> Tuple[List[np.ndarray], float, List[str]]:
    mats, labels = elementary_so(3)
    return mats, 0.5, labels


@registry.algebras.register("so4")
def so4() -> Tuple[List[np.ndarray], float, List[str]]:
    mats, labels = elementary_so(4)
    return mats, 0.5, labels


@registry.algebras.register("so5")
def so5() -> Tuple[List[np.ndarray], float, List[str]]:
    mats, labels = elementary_so(5)
    return mats, 0.5, labels
