"""Pure-Python hot kernels.

This module is the reference fallback for ``_core`` (Cython).  Both must
expose the same functions with identical results; ``unigrowth._kernels``
picks one at import time.

Word kernels work on letters encoded as nonzero ints, ``v + 1`` for the
generator of vertex ``v`` and ``-(v + 1)`` for its inverse.  ``comm`` is a
row-major ``n*n`` bytes object with ``comm[u*n + v] == 1`` iff the
generators commute (the diagonal is 1).
"""
from __future__ import annotations

BACKEND = "python"


def _letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (1 if x > 0 else 0)


def append_letter(word: tuple, x: int, comm: bytes, n: int) -> tuple:
    """Append ``x`` to a reduced word, cancelling against the nearest
    inverse that ``x`` can be shuffled next to."""
    vx = abs(x) - 1
    row = vx * n
    for j in range(len(word) - 1, -1, -1):
        y = word[j]
        if y == -x:
            return word[:j] + word[j + 1:]
        if not comm[row + abs(y) - 1]:
            break
    return word + (x,)


def reduce_word(word, comm: bytes, n: int) -> tuple:
    out: tuple = ()
    for x in word:
        out = append_letter(out, x, comm, n)
    return out


def lex_normal_form(word: tuple, comm: bytes, n: int) -> tuple:
    """Least reordering of a reduced word under (vertex, sign) order that
    only swaps adjacent commuting letters."""
    rest = list(word)
    out = []
    while rest:
        best = -1
        best_key = None
        for p, x in enumerate(rest):
            row = (abs(x) - 1) * n
            ready = True
            for q in range(p):
                if not comm[row + abs(rest[q]) - 1]:
                    ready = False
                    break
            if ready:
                k = _letter_key(x)
                if best_key is None or k < best_key:
                    best, best_key = p, k
        out.append(rest.pop(best))
    return tuple(out)


def normal_form(word, comm: bytes, n: int) -> tuple:
    return lex_normal_form(reduce_word(word, comm, n), comm, n)


def canonical_code(word, nbrs, labels, comm: bytes, n: int):
    """Minimal-dynamic-label reordering of ``word``.

    ``nbrs[v]`` lists the complement-graph neighbours of ``v`` in half-edge
    order; ``labels[v]`` is the initial vertex labeling.  Returns
    ``(reordered, code, final_labels)``.
    """
    rest = list(word)
    labels = list(labels)
    top = max(labels) if labels else 0
    out = []
    code = []
    while rest:
        best = -1
        best_label = 0
        for p, x in enumerate(rest):
            row = (abs(x) - 1) * n
            ready = True
            for q in range(p):
                if not comm[row + abs(rest[q]) - 1]:
                    ready = False
                    break
            if ready:
                lab = labels[abs(x) - 1]
                if best < 0 or lab < best_label:
                    best, best_label = p, lab
        x = rest.pop(best)
        out.append(x)
        code.append(best_label if x > 0 else -best_label)
        for k, v in enumerate(nbrs[abs(x) - 1], start=1):
            labels[v] = top + k
        top += len(nbrs[abs(x) - 1])
    return tuple(out), tuple(code), tuple(labels)


def decode_code(code, nbrs, labels, sentinel: int):
    """Replay the labeling dynamics to recover the reordered word.

    Returns ``None`` when some entry names a label no vertex carries.
    """
    labels = list(labels)
    top = max(labels) if labels else 0
    where = {lab: v for v, lab in enumerate(labels)}
    out = []
    for ell in code:
        if ell == sentinel:
            break
        v = where.get(abs(ell))
        if v is None:
            return None
        out.append(v + 1 if ell > 0 else -(v + 1))
        for k, u in enumerate(nbrs[v], start=1):
            del where[labels[u]]
            labels[u] = top + k
            where[top + k] = u
        top += len(nbrs[v])
    return tuple(out)


# -- derivation kernels --------------------------------------------------------
#
# A graph state is held in flat arrays indexed by integer labels.  Edge ``e``
# runs from ``(tv[e], ts[e])`` to ``(hv[e], hs[e])``; ``tv[e] == 0`` marks a
# dead edge.  ``vs[3*v + s - 1]`` is ``2*edge + end`` (end 0 tail, 1 head) for
# slot ``s`` at vertex ``v``, 0 when the vertex is dead.  Group labels are
# residues modulo ``mod`` held in ``ncol`` parallel columns, so several
# labelings of one shape share a single enumeration.  Split kinds are 0
# (double) and 1 (loop).


class _State:
    __slots__ = ("tv", "ts", "hv", "hs", "lab", "vs", "M", "N", "ecre", "vcre", "vidx", "mod")

    def copy(self):
        s = _State.__new__(_State)
        s.tv, s.ts, s.hv, s.hs = self.tv[:], self.ts[:], self.hv[:], self.hs[:]
        s.lab = [c[:] for c in self.lab]
        s.vs = self.vs[:]
        s.M, s.N, s.mod = self.M, self.N, self.mod
        s.ecre, s.vcre, s.vidx = self.ecre[:], self.vcre[:], self.vidx[:]
        return s


def _make_state(tv, ts, hv, hs, cols, mod, R):
    N0 = len(tv) - 1
    M0 = max(max(tv[1:], default=0), max(hv[1:], default=0))
    ecap, vcap = N0 + R + 2, M0 + 2 * R + 2
    st = _State()
    st.tv = list(tv) + [0] * (ecap - len(tv))
    st.ts = list(ts) + [0] * (ecap - len(ts))
    st.hv = list(hv) + [0] * (ecap - len(hv))
    st.hs = list(hs) + [0] * (ecap - len(hs))
    st.lab = [[x % mod for x in c] + [0] * (ecap - len(c)) for c in cols]
    st.vs = [0] * (3 * vcap)
    for e in range(1, N0 + 1):
        if tv[e]:
            st.vs[3 * tv[e] + ts[e] - 1] = 2 * e
            st.vs[3 * hv[e] + hs[e] - 1] = 2 * e + 1
    st.M, st.N, st.mod = M0, N0, mod
    st.ecre = [0] * ecap
    st.vcre = [0] * vcap
    st.vidx = [0] * vcap
    return st


def _set_end(st, x, v, s):
    e, end = x >> 1, x & 1
    if end:
        st.hv[e], st.hs[e] = v, s
    else:
        st.tv[e], st.ts[e] = v, s
    st.vs[3 * v + s - 1] = x


def _apply(st, e, kind, cfg, step):
    """Apply a split in place.  Returns the step record or None if the split
    does not fit the graph."""
    if e < 1 or e > st.N or not st.tv[e]:
        return None
    A, sA, B, sB = st.tv[e], st.ts[e], st.hv[e], st.hs[e]
    is_loop = A == B
    if is_loop != (kind == 1) or not 0 <= cfg <= (1 if is_loop else 3):
        return None
    mod = st.mod
    creators = {st.ecre[e], st.vcre[A], st.vcre[B]}
    creators.discard(0)
    M, N = st.M, st.N
    if not is_loop:
        oa = [s for s in (1, 2, 3) if s != sA]
        ob = [s for s in (1, 2, 3) if s != sB]
        ia, ib = cfg >> 1, cfg & 1
        xa = st.vs[3 * A + oa[ia] - 1]
        xc = st.vs[3 * A + oa[1 - ia] - 1]
        xb = st.vs[3 * B + ob[ib] - 1]
        xd = st.vs[3 * B + ob[1 - ib] - 1]
        a, b = xa >> 1, xb >> 1
        for col in st.lab:
            ge = col[e]
            col[a] = (col[a] + ge if xa & 1 else col[a] - ge) % mod
            col[b] = (col[b] + ge if not xb & 1 else col[b] - ge) % mod
        record = (e, st.ecre[e], kind, cfg,
                  ((A, st.vcre[A], st.vidx[A], sA), (B, st.vcre[B], st.vidx[B], sB)), creators)
        for s in range(3):
            st.vs[3 * A + s] = 0
            st.vs[3 * B + s] = 0
        na, nb, f = M + 1, M + 2, N + 1
        _set_end(st, xa, nb, 1)
        _set_end(st, xd, nb, 2)
        _set_end(st, xb, na, 1)
        _set_end(st, xc, na, 2)
        _set_end(st, 2 * f, na, 3)
        _set_end(st, 2 * f + 1, nb, 3)
        st.vcre[na] = st.vcre[nb] = step
        st.vidx[na], st.vidx[nb] = 0, 1
        st.M = M + 2
    else:
        s3 = 6 - sA - sB
        xa = st.vs[3 * A + s3 - 1]
        a = xa >> 1
        for col in st.lab:
            ge = col[e]
            if cfg == 0:
                col[a] = (col[a] + ge if xa & 1 else col[a] - ge) % mod
            else:
                col[a] = (col[a] - ge if xa & 1 else col[a] + ge) % mod
        record = (e, st.ecre[e], kind, cfg, ((A, st.vcre[A], st.vidx[A], min(sA, sB)),), creators)
        for s in range(3):
            st.vs[3 * A + s] = 0
        nv, f = M + 1, N + 1
        _set_end(st, xa, nv, s3)
        _set_end(st, 2 * f, nv, sA)
        _set_end(st, 2 * f + 1, nv, sB)
        st.vcre[nv] = step
        st.vidx[nv] = 0
        st.M = M + 1
    for col in st.lab:
        col[f] = col[e]
    st.tv[e] = st.hv[e] = 0
    st.ecre[f] = step
    st.N = N + 1
    return record


def _canonicalize(records, M0, N0):
    """Reorder a derivation (given by its step records) into canonical form.

    Returns ``(order, newpos, vlabel)``: ``order`` lists old step numbers in
    canonical order, ``newpos[k]`` is the new position of old step ``k``
    and ``vlabel[(k, idx)]`` the new label of the ``idx``-th vertex created
    by old step ``k``.
    """
    r = len(records)
    pred = [0] * (r + 1)
    for k in range(1, r + 1):
        m = 0
        for c in records[k - 1][5]:
            m |= (1 << c) | pred[c]
        pred[k] = m
    placed = 0
    order = []
    newpos = [0] * (r + 1)
    vlabel = {}
    Mc = M0
    for q in range(1, r + 1):
        best, best_low = 0, 0
        for k in range(1, r + 1):
            if placed >> k & 1 or pred[k] & ~placed:
                continue
            low = min(v if cre == 0 else vlabel[(cre, idx)] for v, cre, idx, _ in records[k - 1][4])
            if best == 0 or low < best_low:
                best, best_low = k, low
        placed |= 1 << best
        order.append(best)
        newpos[best] = q
        if records[best - 1][2] == 0:
            vlabel[(best, 0)], vlabel[(best, 1)] = Mc + 1, Mc + 2
            Mc += 2
        else:
            vlabel[(best, 0)] = Mc + 1
            Mc += 1
    return order, newpos, vlabel


def _encode(records, order, newpos, vlabel, N0, nphi, npsi):
    phi = [0] * nphi
    psi = [0] * npsi
    splits = []
    for k in order:
        e, ecre, kind, cfg, destroyed, _ = records[k - 1]
        ne = e if ecre == 0 else N0 + newpos[ecre]
        splits.append((ne, kind, cfg))
        psi[ne - 1] = cfg
        for v, cre, idx, slot in destroyed:
            phi[(v if cre == 0 else vlabel[(cre, idx)]) - 1] = slot
    return splits, phi, psi


def _decode(st, phi, psi, R):
    """Replay the matching scan.  Returns the recovered splits or None if the
    pair is malformed.  ``st`` is advanced in place."""
    phi_left = {i + 1 for i, x in enumerate(phi) if x}
    psi_left = {i + 1 for i, x in enumerate(psi) if x}
    out = []
    nphi = len(phi)
    while True:
        hit = 0
        for i in range(1, min(st.M, nphi) + 1):
            p = phi[i - 1]
            if not p or not st.vs[3 * i]:
                continue
            x = st.vs[3 * i + p - 1]
            e = x >> 1
            if st.tv[e] == st.hv[e]:
                hit = e
                break
            if x & 1:
                w, t = st.tv[e], st.ts[e]
            else:
                w, t = st.hv[e], st.hs[e]
            if w <= nphi and phi[w - 1] == t:
                hit = e
                break
        if not hit:
            break
        if len(out) == R or hit > len(psi):
            return None
        kind = 1 if st.tv[hit] == st.hv[hit] else 0
        cfg = psi[hit - 1]
        if kind == 1 and cfg > 1:
            return None
        phi_left.discard(st.tv[hit])
        phi_left.discard(st.hv[hit])
        psi_left.discard(hit)
        _apply(st, hit, kind, cfg, len(out) + 1)
        out.append((hit, kind, cfg))
    if phi_left or psi_left:
        return None
    return out


def _graphs_match(st, dec, N0, M0, newpos, vlabel):
    """Final graph of the original order equals the decoded one once created
    items are renamed to their canonical labels."""
    def vmap(v):
        return v if st.vcre[v] == 0 else vlabel[(st.vcre[v], st.vidx[v])]

    alive = 0
    for e in range(1, st.N + 1):
        if not st.tv[e]:
            continue
        alive += 1
        ne = e if st.ecre[e] == 0 else N0 + newpos[st.ecre[e]]
        if ne > dec.N or not dec.tv[ne]:
            return False
        if (vmap(st.tv[e]), st.ts[e], vmap(st.hv[e]), st.hs[e]) != (dec.tv[ne], dec.ts[ne], dec.hv[ne], dec.hs[ne]):
            return False
        if any(c1[e] != c2[ne] for c1, c2 in zip(st.lab, dec.lab)):
            return False
    return alive == sum(1 for e in range(1, dec.N + 1) if dec.tv[e])


def canonicalize_splits(tv, ts, hv, hs, splits):
    """Canonical form of a derivation given as ``(edge, kind, config)``
    triples.  Returns ``(canonical splits, phi, psi)`` with ``phi``/``psi``
    sized for the derivation's own length, or None if a split does not
    apply."""
    R = len(splits)
    st = _make_state(tv, ts, hv, hs, [], 1, R)
    M0, N0 = st.M, st.N
    records = []
    for k, (e, kind, cfg) in enumerate(splits, start=1):
        rec = _apply(st, e, kind, cfg, k)
        if rec is None:
            return None
        records.append(rec)
    order, newpos, vlabel = _canonicalize(records, M0, N0)
    return _encode(records, order, newpos, vlabel, N0, M0 + 2 * R, N0 + R)


def decode_splits(tv, ts, hv, hs, phi, psi, R):
    st = _make_state(tv, ts, hv, hs, [], 1, R)
    return _decode(st, list(phi), list(psi), R)


def derivation_codec_check(tv, ts, hv, hs, cols, mod, R):
    """Enumerate every derivation of length <= R and check the codec.

    For each derivation: canonicalize, encode with budget R, decode, and
    compare the decoded derivation with the canonical one and the decoded
    final graph with the original final graph (under the canonical renaming
    of created labels).  Returns ``(count, failures, first_failure)`` where
    ``first_failure`` is the offending split list or None.
    """
    base = _make_state(tv, ts, hv, hs, cols, mod, R)
    M0, N0 = base.M, base.N
    nphi, npsi = M0 + 2 * R, N0 + R
    count = 0
    failures = 0
    first = None
    records = []
    path = []

    def check(st):
        nonlocal count, failures, first
        count += 1
        order, newpos, vlabel = _canonicalize(records, M0, N0)
        splits, phi, psi = _encode(records, order, newpos, vlabel, N0, nphi, npsi)
        dec = base.copy()
        got = _decode(dec, phi, psi, R)
        ok = got == splits and _graphs_match(st, dec, N0, M0, newpos, vlabel)
        if not ok:
            failures += 1
            if first is None:
                first = list(path)

    def walk(st, depth):
        check(st)
        if depth == R:
            return
        for e in range(1, st.N + 1):
            if not st.tv[e]:
                continue
            kind = 1 if st.tv[e] == st.hv[e] else 0
            for cfg in range(2 if kind else 4):
                child = st.copy()
                records.append(_apply(child, e, kind, cfg, depth + 1))
                path.append((e, kind, cfg))
                walk(child, depth + 1)
                records.pop()
                path.pop()

    walk(base, 0)
    return count, failures, first
