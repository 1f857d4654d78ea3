"""Closed-form approximation and recovery guarantees for greedy selection.

All factors multiply f^OPT (the best k-subset value) unless noted. m and M are
restricted strong concavity / smoothness parameters on sparse domains, and
gamma is a submodularity ratio.
"""
import math

import numpy as np

from app.core.exceptions import ValidationError


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def topk_norm(v, k: int) -> float:
    """Euclidean norm of the k largest-magnitude entries of v."""
    v = np.asarray(v, dtype=np.float64).ravel()
    _require(1 <= k <= v.shape[0], f"k must be in [1, {v.shape[0]}], got {k}")
    squares = np.sort(v * v)[::-1]
    return float(math.sqrt(np.sum(squares[:k])))


def bound_theorem1(m: float, M_tilde: float) -> float:
    """gamma_{U,k} >= m_{|U|+k} / M~_{|U|+1}."""
    _require(0 < m <= M_tilde, f"need 0 < m <= M_tilde, got m={m}, M_tilde={M_tilde}")
    return m / M_tilde


def bound_theorem1_weak(m: float, M: float) -> float:
    """The looser m_{|U|+k} / M_{|U|+k} form."""
    _require(0 < m <= M, f"need 0 < m <= M, got m={m}, M={M}")
    return m / M


def _lemma2_factor(k: int, m_small: float, M_k: float, m_ratio: float) -> float:
    return max(1.0 / k, (m_small / (4.0 * M_k)) * (3.0 + m_ratio))


def bound_lemma2(m_1: float, M_1: float, M_k: float, k: int) -> float:
    """f([k]) >= factor * sum_j f(j)."""
    _require(k >= 1 and m_1 > 0 and M_1 >= m_1 and M_k > 0, "need k >= 1 and 0 < m_1 <= M_1, M_k > 0")
    return _lemma2_factor(k, m_1, M_k, m_1 / M_1)


def bound_lemma2_weak(m_k: float, M_k: float, k: int) -> float:
    _require(k >= 1 and 0 < m_k <= M_k, "need k >= 1 and 0 < m_k <= M_k")
    return _lemma2_factor(k, m_k, M_k, m_k / M_k)


def bound_oblivious(m_k: float, m_1: float, M_k: float, M_1: float, k: int) -> float:
    """f^OBL >= max{m_k/(k M_1), (m_k m_1/(4 M_k M_1))(3 + m_1/M_1)} f^OPT."""
    _require(k >= 1, f"k must be >= 1, got {k}")
    _require(0 < m_k <= M_k and 0 < m_1 <= M_1, "need positive parameters with m <= M")
    return max(m_k / (k * M_1), (m_k * m_1 / (4.0 * M_k * M_1)) * (3.0 + m_1 / M_1))


def bound_oblivious_weak(m_k: float, M_k: float, k: int) -> float:
    _require(k >= 1 and 0 < m_k <= M_k, "need k >= 1 and 0 < m_k <= M_k")
    ratio = m_k / M_k
    return max(ratio / k, 0.75 * ratio ** 2, ratio ** 3)


def bound_fs(gamma: float, r: int, k: int) -> float:
    """1 - exp(-gamma r/k); r = k is the plain forward stepwise guarantee."""
    _require(gamma > 0 and r >= 1 and k >= 1, f"need gamma > 0, r >= 1, k >= 1, got {gamma}, {r}, {k}")
    return -math.expm1(-gamma * r / k)


def bound_fs_ratio(m: float, M: float, r: int, k: int) -> float:
    """Forward stepwise bound with gamma replaced by its m/M lower bound."""
    _require(0 < m <= M, f"need 0 < m <= M, got m={m}, M={M}")
    return bound_fs(m / M, r, k)


def bound_omp(m: float, M: float, r: int, k: int) -> float:
    _require(0 < m <= M, f"need 0 < m <= M, got m={m}, M={M}")
    _require(r >= 1 and k >= 1, f"need r, k >= 1, got {r}, {k}")
    return -math.expm1(-(m / M) * r / k)


def bound_fs_small_support(m_prime: float, M_prime: float) -> float:
    """2^{-M'/m'} (1 - e^{-m'/M'}), with the unspecified Theta constant taken as 1."""
    _require(0 < m_prime <= M_prime, f"need 0 < m' <= M', got {m_prime}, {M_prime}")
    ratio = m_prime / M_prime
    return 2.0 ** (-1.0 / ratio) * -math.expm1(-ratio)


def recovery_bound(grad_at_target, s: int, r: int, m_sr: float, C_sr: float,
                   l_target_minus_l0: float) -> float:
    """Upper bound on ||beta_hat_r - beta_s||_2^2 after r greedy steps.

    (4/m^2) ||grad l(beta_s)||_{2,s+r}^2 + (4/m)(1 - C) [l(beta_s) - l(0)]
    """
    _require(m_sr > 0, f"m_sr must be > 0, got {m_sr}")
    _require(0.0 <= C_sr <= 1.0, f"C_sr must be in [0, 1], got {C_sr}")
    _require(l_target_minus_l0 >= 0.0, f"l(beta_s) - l(0) must be >= 0, got {l_target_minus_l0}")
    grad = np.asarray(grad_at_target, dtype=np.float64).ravel()
    width = min(s + r, grad.shape[0])
    head = topk_norm(grad, width) ** 2
    return 4.0 / m_sr ** 2 * head + 4.0 / m_sr * (1.0 - C_sr) * l_target_minus_l0


def rip_condition(M_s: float, m_sr: float) -> bool:
    """The restricted isometry requirement M_s <= 2 m_{s+r} of earlier OMP analyses."""
    return M_s <= 2.0 * m_sr


def spiked_rip_threshold(s: int) -> float:
    """Largest spike a in (1-a)I + a11^T for which that requirement can hold at sparsity s."""
    _require(s >= 1, f"s must be >= 1, got {s}")
    return 1.0 / (s + 1)
