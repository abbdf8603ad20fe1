import numpy as np

from screwgrasp.problem import ConicProgram, SocBlock, VariableLayout


def rot(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    K = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def mkprog(f, F, g, socs=(), lb=None, ub=None) -> ConicProgram:
    """Hand-built conic program for solver unit tests."""
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    F = np.asarray(F, dtype=float).reshape(-1, n)
    g = np.asarray(g, dtype=float).reshape(F.shape[0])
    lb = np.full(n, -np.inf) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    layout = VariableLayout(contacts=(), torque_start=n - 1, n_torques=0,
                            eta_index=n - 1, n_vars=n)
    return ConicProgram(f=f, F=F, g=g, socs=tuple(socs), lb=lb, ub=ub, layout=layout)


def soc(A, b, c, d, tag=None, label="") -> SocBlock:
    return SocBlock(A=np.asarray(A, dtype=float), b=np.asarray(b, dtype=float),
                    c=np.asarray(c, dtype=float), d=float(d), tag=tag, label=label)
