# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same functions and results as ``_kernels_py``."""
from libc.string cimport memcpy, memset
from libc.stdlib cimport malloc, free

BACKEND = "cython"

cdef enum:
    CAPE = 48
    CAPV = 96
    MAXCOL = 8
    MAXR = 16


# -- word kernels --------------------------------------------------------------

cdef inline int _key(int x):
    return 2 * ((x if x > 0 else -x) - 1) + (1 if x > 0 else 0)


cdef inline int _abs(int x):
    return x if x > 0 else -x


def append_letter(tuple word, int x, bytes comm, int n):
    cdef const unsigned char* c = comm
    cdef Py_ssize_t j
    cdef int y
    cdef int row = (_abs(x) - 1) * n
    for j in range(len(word) - 1, -1, -1):
        y = word[j]
        if y == -x:
            return word[:j] + word[j + 1:]
        if not c[row + _abs(y) - 1]:
            break
    return word + (x,)


cdef int _reduce(int* buf, int length, const unsigned char* c, int n):
    # in-place left-to-right cancellation; returns the new length
    cdef int out = 0, i, j, k, x, y, row
    for i in range(length):
        x = buf[i]
        row = (_abs(x) - 1) * n
        j = out - 1
        while j >= 0:
            y = buf[j]
            if y == -x:
                break
            if not c[row + _abs(y) - 1]:
                j = -1
                break
            j -= 1
        if j >= 0:
            for k in range(j, out - 1):
                buf[k] = buf[k + 1]
            out -= 1
        else:
            buf[out] = x
            out += 1
    return out


cdef void _lexsort(int* buf, int length, const unsigned char* c, int n):
    cdef int* tmp = <int*>malloc(length * sizeof(int) + 1)
    cdef int rest = length, outn = 0, p, q, best, bk, k, row, ready, x
    memcpy(tmp, buf, length * sizeof(int))
    while rest > 0:
        best = -1
        bk = 0
        for p in range(rest):
            x = tmp[p]
            row = (_abs(x) - 1) * n
            ready = 1
            for q in range(p):
                if not c[row + _abs(tmp[q]) - 1]:
                    ready = 0
                    break
            if ready:
                k = _key(x)
                if best < 0 or k < bk:
                    best = p
                    bk = k
        buf[outn] = tmp[best]
        outn += 1
        for p in range(best, rest - 1):
            tmp[p] = tmp[p + 1]
        rest -= 1
    free(tmp)


cdef int* _to_buf(object word, int* length):
    cdef Py_ssize_t m = len(word), i
    cdef int* buf = <int*>malloc(m * sizeof(int) + 1)
    for i in range(m):
        buf[i] = word[i]
    length[0] = <int>m
    return buf


cdef tuple _from_buf(int* buf, int length):
    return tuple([buf[i] for i in range(length)])


def reduce_word(word, bytes comm, int n):
    cdef int m
    cdef int* buf = _to_buf(word, &m)
    m = _reduce(buf, m, comm, n)
    out = _from_buf(buf, m)
    free(buf)
    return out


def lex_normal_form(tuple word, bytes comm, int n):
    cdef int m
    cdef int* buf = _to_buf(word, &m)
    _lexsort(buf, m, comm, n)
    out = _from_buf(buf, m)
    free(buf)
    return out


def normal_form(word, bytes comm, int n):
    cdef int m
    cdef int* buf = _to_buf(word, &m)
    m = _reduce(buf, m, comm, n)
    _lexsort(buf, m, comm, n)
    out = _from_buf(buf, m)
    free(buf)
    return out


def canonical_code(word, nbrs, labels, bytes comm, int n):
    cdef const unsigned char* c = comm
    cdef int m, p, q, best, blab, lab, row, ready, x, k
    cdef int* rest = _to_buf(word, &m)
    cdef int* lb = <int*>malloc((n + 1) * sizeof(int))
    cdef int top = 0, left = m
    for k in range(n):
        lb[k] = labels[k]
        if lb[k] > top:
            top = lb[k]
    out = []
    code = []
    while left > 0:
        best = -1
        blab = 0
        for p in range(left):
            x = rest[p]
            row = (_abs(x) - 1) * n
            ready = 1
            for q in range(p):
                if not c[row + _abs(rest[q]) - 1]:
                    ready = 0
                    break
            if ready:
                lab = lb[_abs(x) - 1]
                if best < 0 or lab < blab:
                    best = p
                    blab = lab
        x = rest[best]
        for p in range(best, left - 1):
            rest[p] = rest[p + 1]
        left -= 1
        out.append(x)
        code.append(blab if x > 0 else -blab)
        nb = nbrs[_abs(x) - 1]
        for k in range(len(nb)):
            lb[<int>nb[k]] = top + k + 1
        top += len(nb)
    final = tuple([lb[k] for k in range(n)])
    free(rest)
    free(lb)
    return tuple(out), tuple(code), final


def decode_code(code, nbrs, labels, int sentinel):
    labels = list(labels)
    cdef int top = max(labels) if labels else 0
    where = {lab: v for v, lab in enumerate(labels)}
    out = []
    cdef int ell, v, k, u
    for ell in code:
        if ell == sentinel:
            break
        got = where.get(_abs(ell))
        if got is None:
            return None
        v = got
        out.append(v + 1 if ell > 0 else -(v + 1))
        nb = nbrs[v]
        for k in range(len(nb)):
            u = nb[k]
            del where[labels[u]]
            labels[u] = top + k + 1
            where[top + k + 1] = u
        top += len(nb)
    return tuple(out)


# -- derivation kernels ----------------------------------------------------------

cdef struct State:
    int tv[CAPE]
    int ts[CAPE]
    int hv[CAPE]
    int hs[CAPE]
    int lab[MAXCOL][CAPE]
    int vs[3 * CAPV]
    int ecre[CAPE]
    int vcre[CAPV]
    int vidx[CAPV]
    int M
    int N
    int ncol
    int mod


cdef struct Record:
    int e
    int ecre
    int kind
    int cfg
    int ndes
    int dv[2]
    int dcre[2]
    int didx[2]
    int dslot[2]
    int ncre
    int cre[3]


cdef struct Canon:
    int order[MAXR]
    int newpos[MAXR + 1]
    int vl[MAXR + 1][2]


cdef inline void _set_end(State* st, int x, int v, int s):
    cdef int e = x >> 1
    if x & 1:
        st.hv[e] = v
        st.hs[e] = s
    else:
        st.tv[e] = v
        st.ts[e] = s
    st.vs[3 * v + s - 1] = x


cdef inline int _md(int a, int m):
    a = a % m
    return a + m if a < 0 else a


cdef inline void _add_cre(Record* rec, int c):
    cdef int i
    if c == 0:
        return
    for i in range(rec.ncre):
        if rec.cre[i] == c:
            return
    rec.cre[rec.ncre] = c
    rec.ncre += 1


cdef int _apply(State* st, int e, int kind, int cfg, int step, Record* rec):
    if e < 1 or e > st.N or st.tv[e] == 0:
        return 0
    cdef int A = st.tv[e], sA = st.ts[e], B = st.hv[e], sB = st.hs[e]
    cdef int is_loop = A == B
    cdef int oa0, oa1, ob0, ob1, ia, ib, xa, xb, xc, xd, a, b, i, ge, na, nb, f, s3, nv
    cdef int mod = st.mod
    if is_loop != (kind == 1) or cfg < 0 or cfg > (1 if is_loop else 3):
        return 0
    if st.N + 1 >= CAPE or st.M + 2 >= CAPV:
        return 0
    rec.e = e
    rec.ecre = st.ecre[e]
    rec.kind = kind
    rec.cfg = cfg
    rec.ncre = 0
    _add_cre(rec, st.ecre[e])
    _add_cre(rec, st.vcre[A])
    _add_cre(rec, st.vcre[B])
    f = st.N + 1
    if not is_loop:
        oa0 = 1 if sA != 1 else 2
        oa1 = 3 if sA != 3 else 2
        ob0 = 1 if sB != 1 else 2
        ob1 = 3 if sB != 3 else 2
        ia = cfg >> 1
        ib = cfg & 1
        xa = st.vs[3 * A + (oa1 if ia else oa0) - 1]
        xc = st.vs[3 * A + (oa0 if ia else oa1) - 1]
        xb = st.vs[3 * B + (ob1 if ib else ob0) - 1]
        xd = st.vs[3 * B + (ob0 if ib else ob1) - 1]
        a = xa >> 1
        b = xb >> 1
        for i in range(st.ncol):
            ge = st.lab[i][e]
            st.lab[i][a] = _md(st.lab[i][a] + ge if xa & 1 else st.lab[i][a] - ge, mod)
            st.lab[i][b] = _md(st.lab[i][b] - ge if xb & 1 else st.lab[i][b] + ge, mod)
        rec.ndes = 2
        rec.dv[0] = A
        rec.dcre[0] = st.vcre[A]
        rec.didx[0] = st.vidx[A]
        rec.dslot[0] = sA
        rec.dv[1] = B
        rec.dcre[1] = st.vcre[B]
        rec.didx[1] = st.vidx[B]
        rec.dslot[1] = sB
        for i in range(3):
            st.vs[3 * A + i] = 0
            st.vs[3 * B + i] = 0
        na = st.M + 1
        nb = st.M + 2
        _set_end(st, xa, nb, 1)
        _set_end(st, xd, nb, 2)
        _set_end(st, xb, na, 1)
        _set_end(st, xc, na, 2)
        _set_end(st, 2 * f, na, 3)
        _set_end(st, 2 * f + 1, nb, 3)
        st.vcre[na] = step
        st.vcre[nb] = step
        st.vidx[na] = 0
        st.vidx[nb] = 1
        st.M += 2
    else:
        s3 = 6 - sA - sB
        xa = st.vs[3 * A + s3 - 1]
        a = xa >> 1
        for i in range(st.ncol):
            ge = st.lab[i][e]
            if cfg == 0:
                st.lab[i][a] = _md(st.lab[i][a] + ge if xa & 1 else st.lab[i][a] - ge, mod)
            else:
                st.lab[i][a] = _md(st.lab[i][a] - ge if xa & 1 else st.lab[i][a] + ge, mod)
        rec.ndes = 1
        rec.dv[0] = A
        rec.dcre[0] = st.vcre[A]
        rec.didx[0] = st.vidx[A]
        rec.dslot[0] = sA if sA < sB else sB
        for i in range(3):
            st.vs[3 * A + i] = 0
        nv = st.M + 1
        _set_end(st, xa, nv, s3)
        _set_end(st, 2 * f, nv, sA)
        _set_end(st, 2 * f + 1, nv, sB)
        st.vcre[nv] = step
        st.vidx[nv] = 0
        st.M += 1
    for i in range(st.ncol):
        st.lab[i][f] = st.lab[i][e]
    st.tv[e] = 0
    st.hv[e] = 0
    st.ecre[f] = step
    st.N = f
    return 1


cdef void _canonicalize(Record* recs, int r, int M0, Canon* out):
    cdef unsigned int pred[MAXR + 1]
    cdef unsigned int placed = 0, m
    cdef int k, q, i, best, low, blow, lab, c, Mc = M0
    pred[0] = 0
    for k in range(1, r + 1):
        m = 0
        for i in range(recs[k - 1].ncre):
            c = recs[k - 1].cre[i]
            m |= (1u << c) | pred[c]
        pred[k] = m
    for q in range(1, r + 1):
        best = 0
        blow = 0
        for k in range(1, r + 1):
            if (placed >> k) & 1 or (pred[k] & ~placed):
                continue
            low = -1
            for i in range(recs[k - 1].ndes):
                c = recs[k - 1].dcre[i]
                lab = recs[k - 1].dv[i] if c == 0 else out.vl[c][recs[k - 1].didx[i]]
                if low < 0 or lab < low:
                    low = lab
            if best == 0 or low < blow:
                best = k
                blow = low
        placed |= 1u << best
        out.order[q - 1] = best
        out.newpos[best] = q
        if recs[best - 1].kind == 0:
            out.vl[best][0] = Mc + 1
            out.vl[best][1] = Mc + 2
            Mc += 2
        else:
            out.vl[best][0] = Mc + 1
            Mc += 1


cdef void _encode(Record* recs, int r, Canon* cn, int N0, int* phi, int nphi, int* psi, int npsi,
                  int* se, int* sk, int* sc):
    cdef int q, k, i, ne, c, v
    memset(phi, 0, nphi * sizeof(int))
    memset(psi, 0, npsi * sizeof(int))
    for q in range(r):
        k = cn.order[q]
        ne = recs[k - 1].e if recs[k - 1].ecre == 0 else N0 + cn.newpos[recs[k - 1].ecre]
        se[q] = ne
        sk[q] = recs[k - 1].kind
        sc[q] = recs[k - 1].cfg
        psi[ne - 1] = recs[k - 1].cfg
        for i in range(recs[k - 1].ndes):
            c = recs[k - 1].dcre[i]
            v = recs[k - 1].dv[i] if c == 0 else cn.vl[c][recs[k - 1].didx[i]]
            phi[v - 1] = recs[k - 1].dslot[i]


cdef int _decode(State* st, int* phi, int nphi, int* psi, int npsi, int R,
                 int* de, int* dk, int* dc):
    """Returns the number of recovered splits, or -1 if malformed."""
    cdef char used_v[CAPV]
    cdef char used_e[CAPE]
    cdef int count = 0, hit, i, p, x, e, w, t, kind, cfg, top
    cdef Record rec
    memset(used_v, 0, CAPV)
    memset(used_e, 0, CAPE)
    while True:
        hit = 0
        top = st.M if st.M < nphi else nphi
        for i in range(1, top + 1):
            p = phi[i - 1]
            if p == 0 or st.vs[3 * i] == 0:
                continue
            x = st.vs[3 * i + p - 1]
            e = x >> 1
            if st.tv[e] == st.hv[e]:
                hit = e
                break
            if x & 1:
                w = st.tv[e]
                t = st.ts[e]
            else:
                w = st.hv[e]
                t = st.hs[e]
            if w <= nphi and phi[w - 1] == t:
                hit = e
                break
        if hit == 0:
            break
        if count == R or hit > npsi:
            return -1
        kind = 1 if st.tv[hit] == st.hv[hit] else 0
        cfg = psi[hit - 1]
        if kind == 1 and cfg > 1:
            return -1
        used_v[st.tv[hit]] = 1
        used_v[st.hv[hit]] = 1
        used_e[hit] = 1
        if not _apply(st, hit, kind, cfg, count + 1, &rec):
            return -1
        de[count] = hit
        dk[count] = kind
        dc[count] = cfg
        count += 1
    for i in range(nphi):
        if phi[i] and not (i + 1 < CAPV and used_v[i + 1]):
            return -1
    for i in range(npsi):
        if psi[i] and not (i + 1 < CAPE and used_e[i + 1]):
            return -1
    return count


cdef inline int _vmap(State* st, Canon* cn, int v):
    return v if st.vcre[v] == 0 else cn.vl[st.vcre[v]][st.vidx[v]]


cdef int _graphs_match(State* st, State* dec, int N0, Canon* cn):
    cdef int e, ne, i, alive = 0, alive2 = 0
    for e in range(1, st.N + 1):
        if st.tv[e] == 0:
            continue
        alive += 1
        ne = e if st.ecre[e] == 0 else N0 + cn.newpos[st.ecre[e]]
        if ne > dec.N or dec.tv[ne] == 0:
            return 0
        if (_vmap(st, cn, st.tv[e]) != dec.tv[ne] or st.ts[e] != dec.ts[ne]
                or _vmap(st, cn, st.hv[e]) != dec.hv[ne] or st.hs[e] != dec.hs[ne]):
            return 0
        for i in range(st.ncol):
            if st.lab[i][e] != dec.lab[i][ne]:
                return 0
    for e in range(1, dec.N + 1):
        if dec.tv[e]:
            alive2 += 1
    return alive == alive2


cdef int _make_state(State* st, tv, ts, hv, hs, cols, int mod, int R) except -1:
    cdef int N0 = len(tv) - 1, e, i, M0 = 0
    memset(st, 0, sizeof(State))
    if len(cols) > MAXCOL:
        raise ValueError(f"at most {MAXCOL} label columns")
    if R > MAXR - 1:
        raise ValueError(f"at most {MAXR - 1} splits")
    for e in range(1, N0 + 1):
        M0 = max(M0, <int>tv[e], <int>hv[e])
    if N0 + R + 2 > CAPE or M0 + 2 * R + 2 > CAPV:
        raise ValueError("graph too large for the compiled kernel")
    st.ncol = len(cols)
    st.mod = mod
    for e in range(1, N0 + 1):
        st.tv[e] = tv[e]
        st.ts[e] = ts[e]
        st.hv[e] = hv[e]
        st.hs[e] = hs[e]
        if st.tv[e]:
            st.vs[3 * st.tv[e] + st.ts[e] - 1] = 2 * e
            st.vs[3 * st.hv[e] + st.hs[e] - 1] = 2 * e + 1
        for i in range(st.ncol):
            st.lab[i][e] = _md(cols[i][e], mod)
    st.M = M0
    st.N = N0
    return 0


def canonicalize_splits(tv, ts, hv, hs, splits):
    cdef State st
    cdef Record recs[MAXR]
    cdef Canon cn
    cdef int R = len(splits), k, M0, N0
    cdef int phi[CAPV]
    cdef int psi[CAPE]
    cdef int se[MAXR]
    cdef int sk[MAXR]
    cdef int sc[MAXR]
    _make_state(&st, tv, ts, hv, hs, [], 1, R)
    M0 = st.M
    N0 = st.N
    for k in range(R):
        e, kind, cfg = splits[k]
        if not _apply(&st, e, kind, cfg, k + 1, &recs[k]):
            return None
    _canonicalize(recs, R, M0, &cn)
    _encode(recs, R, &cn, N0, phi, M0 + 2 * R, psi, N0 + R, se, sk, sc)
    return ([(se[k], sk[k], sc[k]) for k in range(R)],
            [phi[k] for k in range(M0 + 2 * R)], [psi[k] for k in range(N0 + R)])


def decode_splits(tv, ts, hv, hs, phi, psi, int R):
    cdef State st
    cdef int nphi = len(phi), npsi = len(psi), k, got
    cdef int cphi[CAPV]
    cdef int cpsi[CAPE]
    cdef int de[MAXR]
    cdef int dk[MAXR]
    cdef int dc[MAXR]
    _make_state(&st, tv, ts, hv, hs, [], 1, R)
    if nphi > CAPV or npsi > CAPE:
        raise ValueError("pair too large")
    for k in range(nphi):
        cphi[k] = phi[k]
    for k in range(npsi):
        cpsi[k] = psi[k]
    got = _decode(&st, cphi, nphi, cpsi, npsi, R, de, dk, dc)
    if got < 0:
        return None
    return [(de[k], dk[k], dc[k]) for k in range(got)]


cdef struct Walk:
    long count
    long failures
    int R
    int M0
    int N0
    int nphi
    int npsi
    int have_first
    int first_len
    int first[MAXR][3]
    int path[MAXR][3]


cdef void _check(State* st, State* base, Record* recs, int r, Walk* w):
    cdef Canon cn
    cdef State dec
    cdef int phi[CAPV]
    cdef int psi[CAPE]
    cdef int se[MAXR]
    cdef int sk[MAXR]
    cdef int sc[MAXR]
    cdef int de[MAXR]
    cdef int dk[MAXR]
    cdef int dc[MAXR]
    cdef int got, k, ok
    w.count += 1
    _canonicalize(recs, r, w.M0, &cn)
    _encode(recs, r, &cn, w.N0, phi, w.nphi, psi, w.npsi, se, sk, sc)
    memcpy(&dec, base, sizeof(State))
    got = _decode(&dec, phi, w.nphi, psi, w.npsi, w.R, de, dk, dc)
    ok = got == r
    if ok:
        for k in range(r):
            if de[k] != se[k] or dk[k] != sk[k] or dc[k] != sc[k]:
                ok = 0
                break
    if ok:
        ok = _graphs_match(st, &dec, w.N0, &cn)
    if not ok:
        w.failures += 1
        if not w.have_first:
            w.have_first = 1
            w.first_len = r
            memcpy(w.first, w.path, sizeof(w.path))


cdef void _walk(State* stack, State* base, Record* recs, int depth, Walk* w):
    cdef State* st = &stack[depth]
    cdef State* child = &stack[depth + 1]
    cdef int e, kind, cfg, ncfg, N = st.N
    _check(st, base, recs, depth, w)
    if depth == w.R:
        return
    for e in range(1, N + 1):
        if st.tv[e] == 0:
            continue
        kind = 1 if st.tv[e] == st.hv[e] else 0
        ncfg = 2 if kind else 4
        for cfg in range(ncfg):
            memcpy(child, st, sizeof(State))
            _apply(child, e, kind, cfg, depth + 1, &recs[depth])
            w.path[depth][0] = e
            w.path[depth][1] = kind
            w.path[depth][2] = cfg
            _walk(stack, base, recs, depth + 1, w)


def derivation_codec_check(tv, ts, hv, hs, cols, int mod, int R):
    cdef State* stack = <State*>malloc((MAXR + 1) * sizeof(State))
    cdef State base
    cdef Record recs[MAXR]
    cdef Walk w
    if stack == NULL:
        raise MemoryError()
    try:
        _make_state(&base, tv, ts, hv, hs, cols, mod, R)
        memset(&w, 0, sizeof(Walk))
        w.R = R
        w.M0 = base.M
        w.N0 = base.N
        w.nphi = base.M + 2 * R
        w.npsi = base.N + R
        memcpy(&stack[0], &base, sizeof(State))
        _walk(stack, &base, recs, 0, &w)
        first = None
        if w.have_first:
            first = [(w.first[k][0], w.first[k][1], w.first[k][2]) for k in range(w.first_len)]
        return w.count, w.failures, first
    finally:
        free(stack)
