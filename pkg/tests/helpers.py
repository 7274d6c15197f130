"""Shared test oracles: central finite differences and relative error.

These stay independent of autograd; they only ever call forward passes.
"""

import numpy as np
import torch


def rel_err(a, b, floor=1e-12):
    """Norm-based relative error between two gradient estimates."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    denom = max(np.linalg.norm(a), np.linalg.norm(b), floor)
    return float(np.linalg.norm(a - b) / denom)


def finite_diff_grad(f, x, eps=1e-4):
    """Central-difference gradient of scalar f w.r.t. every entry of x.

    f must be a pure function of x's values (forward passes only).
    """
    x = x.detach().clone()
    flat = x.reshape(-1)
    grad = torch.zeros_like(flat)
    for i in range(flat.numel()):
        orig = flat[i].item()
        flat[i] = orig + eps
        hi = float(f(x))
        flat[i] = orig - eps
        lo = float(f(x))
        flat[i] = orig
        grad[i] = (hi - lo) / (2.0 * eps)
    return grad.reshape(x.shape)


def finite_diff_grad_entries(f, tensor, entries, eps=1e-4):
    """Central differences w.r.t. a subset of flat indices of `tensor`.

    Used for parameter tensors too large to perturb exhaustively. Mutates
    and restores the tensor in place; returns one estimate per entry.
    """
    flat = tensor.detach().reshape(-1)
    grads = []
    for i in entries:
        orig = flat[i].item()
        flat[i] = orig + eps
        hi = float(f())
        flat[i] = orig - eps
        lo = float(f())
        flat[i] = orig
        grads.append((hi - lo) / (2.0 * eps))
    return np.array(grads)


def autograd_grad(f, x):
    """Autodiff gradient of scalar f w.r.t. leaf tensor x."""
    x = x.detach().clone().requires_grad_(True)
    out = f(x)
    out.backward()
    return x.grad.detach().clone()
