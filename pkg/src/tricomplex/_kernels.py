"""Compiled inner loops shared by the distance field, the renderer and the
2D figure path.  The pure-Python functions in :mod:`dynamics` and
:mod:`distance` are the reference; these must agree with them.
"""
import math

import numba
import numpy as np

# ln(1e100): refinement steps after escape never push |z| past this
LOG_CAP = 230.25850929940458
_DZ_RESCALE = 1e150
_LOG_DZ_RESCALE = 345.38776394910684

_jit = numba.njit(cache=True, nogil=True)


@_jit
def ipow(z, p):
    result = 1.0 + 0.0j
    base = z
    while p:
        if p & 1:
            result = result * base
        p >>= 1
        if p:
            base = base * base
    return result


@_jit
def critical_radius(p):
    return 2.0 ** (1.0 / (p - 1))


@_jit
def working_radius(escape_radius, p, sharp):
    return max(min(escape_radius, 10.0 ** (250.0 / p)), sharp)


@_jit
def multibrot_member(c, p, max_iter):
    r2 = critical_radius(p) ** 2
    z = c
    for _ in range(max_iter):
        if z.real * z.real + z.imag * z.imag > r2:
            return False
        z = ipow(z, p) + c
    return True


@_jit
def julia_member(z, c, p, max_iter):
    r = max(abs(c), critical_radius(p))
    r2 = r * r
    for _ in range(max_iter):
        if z.real * z.real + z.imag * z.imag > r2:
            return False
        z = ipow(z, p) + c
    return True


@_jit
def multibrot_member_batch(cs, p, max_iter):
    out = np.empty(cs.shape[0], dtype=np.bool_)
    for i in range(cs.shape[0]):
        out[i] = multibrot_member(cs[i], p, max_iter)
    return out


@_jit
def julia_member_batch(zs, c, p, max_iter):
    out = np.empty(zs.shape[0], dtype=np.bool_)
    for i in range(zs.shape[0]):
        out[i] = julia_member(zs[i], c, p, max_iter)
    return out


@_jit
def component_bounds(z0, c, p, max_iter, escape_radius, multibrot):
    """Distance bounds for one complex component.

    Returns (lower, upper, interior, degenerate, smooth_count).
    """
    if multibrot:
        c = z0
        r = working_radius(escape_radius, p, critical_radius(p))
        z = z0
        dz = 1.0 + 0.0j
        m = 1
    else:
        r = working_radius(escape_radius, p, max(abs(c), critical_radius(p)))
        z = z0
        dz = 1.0 + 0.0j
        m = 0
    shift = 0.0
    while m < max_iter and abs(z) <= r:
        zp = ipow(z, p - 1)
        if multibrot:
            dz = p * zp * dz + math.exp(-shift)
        else:
            dz = p * zp * dz
        z = zp * z + c
        m += 1
        if abs(dz) > _DZ_RESCALE:
            dz = dz / _DZ_RESCALE
            shift += _LOG_DZ_RESCALE
    if abs(z) <= r:
        return 0.0, 0.0, True, False, float(max_iter)
    extra = 0
    while extra < 3 and m < max_iter and p * math.log(abs(z)) < LOG_CAP:
        zp = ipow(z, p - 1)
        if multibrot:
            dz = p * zp * dz + math.exp(-shift)
        else:
            dz = p * zp * dz
        z = zp * z + c
        m += 1
        extra += 1
        if abs(dz) > _DZ_RESCALE:
            dz = dz / _DZ_RESCALE
            shift += _LOG_DZ_RESCALE
    log_z = math.log(abs(z))
    smooth = m - math.log(log_z / math.log(r)) / math.log(p)
    if dz == 0:
        return 0.0, r, False, True, smooth
    log_dz = math.log(abs(dz)) + shift
    depth = m - 1 if multibrot else m
    scale = float(p) ** (-depth)
    arg = log_z - log_dz
    if arg > 700.0:
        return 0.0, r, False, True, smooth
    lower = 0.5 * log_z * math.exp(arg - log_z * scale)
    upper = 2.0 * log_z * math.exp(arg)
    return lower, upper, False, False, smooth


@_jit
def complex_bounds_batch(zs, c, p, max_iter, escape_radius, multibrot):
    n = zs.shape[0]
    lower = np.empty(n)
    upper = np.empty(n)
    interior = np.empty(n, dtype=np.bool_)
    smooth = np.empty(n)
    for i in range(n):
        lo, up, inside, _, nu = component_bounds(zs[i], c, p, max_iter, escape_radius, multibrot)
        lower[i] = lo
        upper[i] = up
        interior[i] = inside
        smooth[i] = nu
    return lower, upper, interior, smooth


@_jit
def slice_bounds(x, y, z, comp_matrix, cs, p, max_iter, escape_radius, multibrot):
    """Aggregated bounds at a 3D point of a slice.

    comp_matrix maps the 3D point to its four idempotent components.  Returns
    (lower, upper, interior, degenerate, tint).
    """
    lows = np.empty(4)
    ups = np.empty(4)
    inside = np.empty(4, dtype=np.bool_)
    degen = np.empty(4, dtype=np.bool_)
    nus = np.empty(4)
    comps = np.empty(4, dtype=np.complex128)
    for k in range(4):
        comps[k] = comp_matrix[k, 0] * x + comp_matrix[k, 1] * y + comp_matrix[k, 2] * z
        reused = False
        for j in range(k):
            if comps[j] == comps[k] and cs[j] == cs[k]:
                lows[k] = lows[j]
                ups[k] = ups[j]
                inside[k] = inside[j]
                degen[k] = degen[j]
                nus[k] = nus[j]
                reused = True
                break
        if not reused:
            lo, up, ins, dg, nu = component_bounds(
                comps[k], cs[k], p, max_iter, escape_radius, multibrot
            )
            lows[k] = lo
            ups[k] = up
            inside[k] = ins
            degen[k] = dg
            nus[k] = nu
    lsum = 0.0
    usum = 0.0
    all_inside = True
    any_degen = False
    tint = 0.0
    n_out = 0
    for k in range(4):
        if inside[k]:
            continue
        all_inside = False
        lsum += lows[k] * lows[k]
        usum += ups[k] * ups[k]
        any_degen = any_degen or degen[k]
        tint += nus[k]
        n_out += 1
    if all_inside:
        return 0.0, 0.0, True, False, 1.0
    tint = min(max(tint / n_out / max_iter, 0.0), 1.0)
    return math.sqrt(lsum / 4.0), math.sqrt(usum / 4.0), False, any_degen, tint


@_jit
def slice_bounds_batch(points, comp_matrix, cs, p, max_iter, escape_radius, multibrot):
    n = points.shape[0]
    lower = np.empty(n)
    upper = np.empty(n)
    interior = np.empty(n, dtype=np.bool_)
    degenerate = np.empty(n, dtype=np.bool_)
    tint = np.empty(n)
    for i in range(n):
        lo, up, ins, dg, tn = slice_bounds(
            points[i, 0], points[i, 1], points[i, 2],
            comp_matrix, cs, p, max_iter, escape_radius, multibrot,
        )
        lower[i] = lo
        upper[i] = up
        interior[i] = ins
        degenerate[i] = dg
        tint[i] = tn
    return lower, upper, interior, degenerate, tint


@_jit
def field_normal(px, py, pz, h, dx, dy, dz, comp_matrix, cs, p, max_iter, escape_radius, multibrot):
    grad = np.empty(3)
    for axis in range(3):
        ox = h if axis == 0 else 0.0
        oy = h if axis == 1 else 0.0
        oz = h if axis == 2 else 0.0
        fp = slice_bounds(px + ox, py + oy, pz + oz, comp_matrix, cs, p, max_iter, escape_radius, multibrot)[0]
        fm = slice_bounds(px - ox, py - oy, pz - oz, comp_matrix, cs, p, max_iter, escape_radius, multibrot)[0]
        grad[axis] = (fp - fm) / (2.0 * h)
    norm = math.sqrt(grad[0] ** 2 + grad[1] ** 2 + grad[2] ** 2)
    if norm == 0.0 or not math.isfinite(norm):
        dn = math.sqrt(dx * dx + dy * dy + dz * dz)
        return -dx / dn, -dy / dn, -dz / dn, True
    return grad[0] / norm, grad[1] / norm, grad[2] / norm, False


@_jit
def march_batch(origins, dirs, comp_matrix, cs, p, max_iter, escape_radius, multibrot,
                bound_radius, epsilon, max_steps, safety, t_max, normal_h):
    n = origins.shape[0]
    hit = np.zeros(n, dtype=np.bool_)
    points = np.zeros((n, 3))
    normals = np.zeros((n, 3))
    steps = np.zeros(n, dtype=np.int64)
    travelled = np.zeros(n)
    tint = np.zeros(n)
    for i in range(n):
        ox, oy, oz = origins[i, 0], origins[i, 1], origins[i, 2]
        dx, dy, dz = dirs[i, 0], dirs[i, 1], dirs[i, 2]
        b = ox * dx + oy * dy + oz * dz
        cc = ox * ox + oy * oy + oz * oz - bound_radius * bound_radius
        disc = b * b - cc
        if disc < 0.0:
            continue
        root = math.sqrt(disc)
        t_far = -b + root
        if t_far < 0.0:
            continue
        t = max(-b - root, 0.0)
        t_end = min(t_far, t_max)
        k = 0
        while k < max_steps and t <= t_end:
            px = ox + t * dx
            py = oy + t * dy
            pz = oz + t * dz
            lo, _, inside, _, tn = slice_bounds(px, py, pz, comp_matrix, cs, p, max_iter,
                                                escape_radius, multibrot)
            k += 1
            if inside or lo < epsilon:
                hit[i] = True
                points[i, 0] = px
                points[i, 1] = py
                points[i, 2] = pz
                tint[i] = tn
                nx, ny, nz, _ = field_normal(px, py, pz, normal_h, dx, dy, dz, comp_matrix, cs,
                                             p, max_iter, escape_radius, multibrot)
                normals[i, 0] = nx
                normals[i, 1] = ny
                normals[i, 2] = nz
                break
            t += safety * lo
        steps[i] = k
        travelled[i] = t
    return hit, points, normals, steps, travelled, tint
