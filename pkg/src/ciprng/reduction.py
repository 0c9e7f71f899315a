"""The cumulative-XOR construction and the bijections used to reason about it.

``construct_X`` turns a seed pair ``(x0, S0)`` and blocks ``S1..Sk`` from
an underlying generator into the running XORs
``x0^S0^S1, x0^S0^S1^S2, ...``.  For a fixed word ``y`` the map
``phi_y(w) = (y^w1, y^w1^w2, ...)`` is a bijection, so feeding it uniform
blocks yields uniform blocks; ``construct_X(x0, S0, H) == phi_y(x0^S0, H)``.

These functions make that argument executable on small sizes.  They do not
prove anything about asymptotic security.
"""


def construct_X(x0, S0, blocks):
    """Block ``j`` is ``x0 ^ S0 ^ S_1 ^ ... ^ S_j``."""
    acc = x0 ^ S0
    out = []
    for s in blocks:
        acc ^= s
        out.append(acc)
    return tuple(out)


def phi_y(y, w):
    """Block ``j`` is ``y ^ w_1 ^ ... ^ w_j``."""
    acc = y
    out = []
    for block in w:
        acc ^= block
        out.append(acc)
    return tuple(out)


def phi_y_inverse(y, z):
    """``w_1 = z_1 ^ y`` and ``w_j = z_j ^ z_{j-1}``."""
    out = []
    prev = y
    for block in z:
        out.append(block ^ prev)
        prev = block
    return tuple(out)


def distinguisher_wrapper(D, w, y_source):
    """The wrapped test ``D'``: draw ``y``, return ``D(phi_y(y, w))``."""
    return D(phi_y(y_source(), w))
