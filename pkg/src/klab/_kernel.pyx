# cython: language_level=3, boundscheck=False, wraparound=False
"""MPFR implementations of the three O(n^2)/O(n) hot loops.

Numbers cross the boundary as ``(mantissa, exponent)`` integer pairs, value
``mantissa * 2**exponent``; complex numbers are pairs of those.  The
``kernels.PythonBackend`` implements the same functions on mpmath.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport strlen


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    int mpz_set_str(mpz_t, const char *, int)
    char *mpz_get_str(char *, int, const mpz_t)
    void mpz_neg(mpz_t, const mpz_t)
    int mpz_sgn(const mpz_t)
    size_t mpz_sizeinbase(const mpz_t, int)


cdef extern from "mpfr.h":
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct mpfr_t[1]
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef int mpfr_rnd_t
    mpfr_rnd_t MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_set_si(mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_set_z_2exp(mpfr_ptr, const mpz_t, mpfr_exp_t, mpfr_rnd_t)
    mpfr_exp_t mpfr_get_z_2exp(mpz_t, mpfr_ptr)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_fma(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_fms(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_zero_p(mpfr_ptr)
    mpfr_exp_t mpfr_get_exp(mpfr_ptr)


cdef struct cnum:
    __mpfr_struct re
    __mpfr_struct im


cdef class _Pool:
    """Owns a block of complex MPFR numbers and frees it on collection."""
    cdef cnum *v
    cdef Py_ssize_t n

    def __cinit__(self, Py_ssize_t n, long prec):
        cdef Py_ssize_t i
        self.n = 0
        self.v = <cnum *> malloc(max(n, 1) * sizeof(cnum))
        if self.v is NULL:
            raise MemoryError()
        for i in range(n):
            mpfr_init2(&self.v[i].re, prec)
            mpfr_init2(&self.v[i].im, prec)
            mpfr_set_ui(&self.v[i].re, 0, MPFR_RNDN)
            mpfr_set_ui(&self.v[i].im, 0, MPFR_RNDN)
        self.n = n

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.v is not NULL:
            for i in range(self.n):
                mpfr_clear(&self.v[i].re)
                mpfr_clear(&self.v[i].im)
            free(self.v)


cdef int _load(mpfr_ptr x, object pair) except -1:
    cdef object man = pair[0]
    cdef long exp = pair[1]
    cdef mpz_t z
    cdef bytes digits
    if man == 0:
        mpfr_set_ui(x, 0, MPFR_RNDN)
        return 0
    digits = format(abs(man), "x").encode("ascii")
    mpz_init(z)
    mpz_set_str(z, digits, 16)
    if man < 0:
        mpz_neg(z, z)
    mpfr_set_z_2exp(x, z, exp, MPFR_RNDN)
    mpz_clear(z)
    return 0


cdef object _dump(mpfr_ptr x):
    cdef mpz_t z
    cdef mpfr_exp_t e
    cdef char *s
    cdef object man
    if mpfr_zero_p(x):
        return (0, 0)
    mpz_init(z)
    e = mpfr_get_z_2exp(z, x)
    s = <char *> malloc(mpz_sizeinbase(z, 16) + 3)
    if s is NULL:
        mpz_clear(z)
        raise MemoryError()
    mpz_get_str(s, 16, z)
    man = int(s[:strlen(s)].decode("ascii"), 16)
    free(s)
    mpz_clear(z)
    return (man, e)


cdef inline int _cload(cnum *c, object pair) except -1:
    _load(&c.re, pair[0])
    _load(&c.im, pair[1])
    return 0


cdef inline object _cdump(cnum *c):
    return (_dump(&c.re), _dump(&c.im))


cdef inline void _cmul(cnum *r, cnum *a, cnum *b, mpfr_ptr t1, mpfr_ptr t2):
    # r may alias a or b
    mpfr_mul(t1, &a.re, &b.re, MPFR_RNDN)
    mpfr_fms(t1, &a.im, &b.im, t1, MPFR_RNDN)
    mpfr_neg(t1, t1, MPFR_RNDN)
    mpfr_mul(t2, &a.re, &b.im, MPFR_RNDN)
    mpfr_fma(&r.im, &a.im, &b.re, t2, MPFR_RNDN)
    mpfr_set(&r.re, t1, MPFR_RNDN)


cdef inline void _cdiv(cnum *r, cnum *a, cnum *b, mpfr_ptr t1, mpfr_ptr t2, mpfr_ptr t3):
    # r = a / b; r may alias a
    mpfr_mul(t3, &b.re, &b.re, MPFR_RNDN)
    mpfr_fma(t3, &b.im, &b.im, t3, MPFR_RNDN)
    mpfr_mul(t1, &a.re, &b.re, MPFR_RNDN)
    mpfr_fma(t1, &a.im, &b.im, t1, MPFR_RNDN)
    mpfr_mul(t2, &a.im, &b.re, MPFR_RNDN)
    mpfr_fms(t2, &a.re, &b.im, t2, MPFR_RNDN)
    mpfr_neg(t2, t2, MPFR_RNDN)
    mpfr_div(&r.re, t1, t3, MPFR_RNDN)
    mpfr_div(&r.im, t2, t3, MPFR_RNDN)


cdef inline void _csub(cnum *r, cnum *a, cnum *b):
    mpfr_sub(&r.re, &a.re, &b.re, MPFR_RNDN)
    mpfr_sub(&r.im, &a.im, &b.im, MPFR_RNDN)


cdef inline void _cset(cnum *r, cnum *a):
    mpfr_set(&r.re, &a.re, MPFR_RNDN)
    mpfr_set(&r.im, &a.im, MPFR_RNDN)


cdef inline long _cexp(cnum *a):
    # binary exponent of the larger component, or a very small number for 0
    cdef long e1 = -(1 << 60)
    cdef long e2 = -(1 << 60)
    if not mpfr_zero_p(&a.re):
        e1 = mpfr_get_exp(&a.re)
    if not mpfr_zero_p(&a.im):
        e2 = mpfr_get_exp(&a.im)
    return e1 if e1 > e2 else e2


def moments_forward(object inv_c, object plus, object minus, object m0, long kmax, long prec):
    """m_k = ((-1)^k e^c - e^-c)/c + k/c m_{k-1}, with plus = e^c/c, minus = e^-c/c.

    Returns the list m_0..m_kmax.
    """
    cdef _Pool p = _Pool(5, prec)
    cdef cnum *ic = &p.v[0]
    cdef cnum *ep = &p.v[1]
    cdef cnum *em = &p.v[2]
    cdef cnum *m = &p.v[3]
    cdef cnum *t = &p.v[4]
    cdef mpfr_t t1, t2
    cdef long k
    mpfr_init2(t1, prec)
    mpfr_init2(t2, prec)
    _cload(ic, inv_c)
    _cload(ep, plus)
    _cload(em, minus)
    _cload(m, m0)
    out = [_cdump(m)]
    for k in range(1, kmax + 1):
        _cmul(m, m, ic, t1, t2)
        mpfr_mul_ui(&m.re, &m.re, k, MPFR_RNDN)
        mpfr_mul_ui(&m.im, &m.im, k, MPFR_RNDN)
        if k % 2 == 0:
            mpfr_add(&m.re, &m.re, &ep.re, MPFR_RNDN)
            mpfr_add(&m.im, &m.im, &ep.im, MPFR_RNDN)
        else:
            mpfr_sub(&m.re, &m.re, &ep.re, MPFR_RNDN)
            mpfr_sub(&m.im, &m.im, &ep.im, MPFR_RNDN)
        mpfr_sub(&m.re, &m.re, &em.re, MPFR_RNDN)
        mpfr_sub(&m.im, &m.im, &em.im, MPFR_RNDN)
        out.append(_cdump(m))
    mpfr_clear(t1)
    mpfr_clear(t2)
    return out


def chebyshev(list moments, long n_max, long prec, long loss_bits):
    """Mixed-moment (Chebyshev) algorithm.

    Returns ``(alpha, beta, h, degenerate)`` where the lists hold rows
    ``0..last`` and ``degenerate`` is the first ``k`` whose diagonal mixed
    moment vanished to working precision (or -1).  A diagonal moment counts as
    vanished when it is exactly zero or when it is ``loss_bits`` binary orders
    below the terms it was formed from.
    """
    cdef long L = 2 * n_max + 2
    cdef long k, l, top
    if len(moments) < L:
        raise ValueError("need moments m_0..m_{2 n_max + 1}")
    cdef _Pool rows = _Pool(3 * L, prec)
    cdef _Pool coef = _Pool(2 * (n_max + 1) + 4, prec)
    cdef cnum *prev2 = &rows.v[0]
    cdef cnum *prev = &rows.v[L]
    cdef cnum *cur = &rows.v[2 * L]
    cdef cnum *swap
    cdef cnum *alpha = &coef.v[0]
    cdef cnum *beta = &coef.v[n_max + 1]
    cdef cnum *tmp = &coef.v[2 * (n_max + 1)]
    cdef cnum *q_prev = &coef.v[2 * (n_max + 1) + 1]
    cdef cnum *q = &coef.v[2 * (n_max + 1) + 2]
    cdef cnum *tmp2 = &coef.v[2 * (n_max + 1) + 3]
    cdef mpfr_t t1, t2, t3
    cdef long ebig, e
    mpfr_init2(t1, prec)
    mpfr_init2(t2, prec)
    mpfr_init2(t3, prec)
    for l in range(L):
        _cload(&prev[l], moments[l])
    al, be, hh = [], [], []
    degenerate = -1
    try:
        if mpfr_zero_p(&prev[0].re) and mpfr_zero_p(&prev[0].im):
            return al, be, hh, 0
        # row 0
        _cdiv(&alpha[0], &prev[1], &prev[0], t1, t2, t3)
        _cset(&beta[0], &prev[0])
        _cset(q_prev, &alpha[0])
        al.append(_cdump(&alpha[0]))
        be.append(_cdump(&beta[0]))
        hh.append(_cdump(&prev[0]))
        for k in range(1, n_max + 1):
            top = L - k
            ebig = -(1 << 60)
            for l in range(k, top):
                # cur[l] = prev[l+1] - alpha[k-1] prev[l] - beta[k-1] prev2[l]
                _cmul(tmp, &alpha[k - 1], &prev[l], t1, t2)
                _csub(&cur[l], &prev[l + 1], tmp)
                if k >= 2:
                    _cmul(tmp2, &beta[k - 1], &prev2[l], t1, t2)
                    _csub(&cur[l], &cur[l], tmp2)
                if l == k:
                    ebig = _cexp(&prev[l + 1])
                    e = _cexp(tmp)
                    if e > ebig:
                        ebig = e
                    if k >= 2:
                        e = _cexp(tmp2)
                        if e > ebig:
                            ebig = e
            if (mpfr_zero_p(&cur[k].re) and mpfr_zero_p(&cur[k].im)) or _cexp(&cur[k]) < ebig - loss_bits:
                degenerate = k
                break
            _cdiv(q, &cur[k + 1], &cur[k], t1, t2, t3)
            _csub(&alpha[k], q, q_prev)
            _cset(q_prev, q)
            _cdiv(&beta[k], &cur[k], &prev[k - 1], t1, t2, t3)
            al.append(_cdump(&alpha[k]))
            be.append(_cdump(&beta[k]))
            hh.append(_cdump(&cur[k]))
            swap = prev2
            prev2 = prev
            prev = cur
            cur = swap
        return al, be, hh, degenerate
    finally:
        mpfr_clear(t1)
        mpfr_clear(t2)
        mpfr_clear(t3)


def three_term_many(list alpha, list beta, long n, list zs, long prec):
    """Monic p_n, p_n' and p_{n-1} at each point of ``zs`` by forward recurrence."""
    cdef _Pool c = _Pool(2 * n + 8, prec)
    cdef cnum *a = &c.v[0]
    cdef cnum *b = &c.v[n]
    cdef cnum *z = &c.v[2 * n]
    cdef cnum *p0 = &c.v[2 * n + 1]
    cdef cnum *p1 = &c.v[2 * n + 2]
    cdef cnum *d0 = &c.v[2 * n + 3]
    cdef cnum *d1 = &c.v[2 * n + 4]
    cdef cnum *w = &c.v[2 * n + 5]
    cdef cnum *t = &c.v[2 * n + 6]
    cdef cnum *u = &c.v[2 * n + 7]
    cdef mpfr_t t1, t2
    cdef long k
    mpfr_init2(t1, prec)
    mpfr_init2(t2, prec)
    for k in range(n):
        _cload(&a[k], alpha[k])
        _cload(&b[k], beta[k])
    out = []
    for zp in zs:
        _cload(z, zp)
        # p_{-1} = 0, p_0 = 1
        mpfr_set_ui(&p0.re, 0, MPFR_RNDN); mpfr_set_ui(&p0.im, 0, MPFR_RNDN)
        mpfr_set_ui(&p1.re, 1, MPFR_RNDN); mpfr_set_ui(&p1.im, 0, MPFR_RNDN)
        mpfr_set_ui(&d0.re, 0, MPFR_RNDN); mpfr_set_ui(&d0.im, 0, MPFR_RNDN)
        mpfr_set_ui(&d1.re, 0, MPFR_RNDN); mpfr_set_ui(&d1.im, 0, MPFR_RNDN)
        for k in range(n):
            _csub(w, z, &a[k])
            # new derivative: p1 + w d1 - b d0
            _cmul(t, w, d1, t1, t2)
            mpfr_add(&t.re, &t.re, &p1.re, MPFR_RNDN)
            mpfr_add(&t.im, &t.im, &p1.im, MPFR_RNDN)
            _cmul(u, &b[k], d0, t1, t2)
            _csub(t, t, u)
            _cset(d0, d1)
            _cset(d1, t)
            # new value: w p1 - b p0
            _cmul(t, w, p1, t1, t2)
            _cmul(u, &b[k], p0, t1, t2)
            _csub(t, t, u)
            _cset(p0, p1)
            _cset(p1, t)
        out.append((_cdump(p1), _cdump(d1), _cdump(p0)))
    mpfr_clear(t1)
    mpfr_clear(t2)
    return out
