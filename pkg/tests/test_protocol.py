import random

import pytest

from pirstream.errors import (
    AuditTooLarge,
    InvalidParams,
    ShapeMismatch,
    SupportTooLarge,
    SupportTooSmall,
)
from pirstream.fields import Field
from pirstream.grs import GrsCode
from pirstream.protocol import (
    block_scheme,
    byzantine_scheme,
    make_queries,
    plain_scheme,
    privacy_audit,
    random_files,
    run_protocol,
    server_respond,
    storage_encode,
    stream_from_csv,
)
from pirstream.seeds import derive_rng, derive_seed

GF5 = Field(5)
GF16 = Field(2, 4)
C6 = GrsCode(GF16, 6, 2, tuple(range(1, 7)))
C10 = GrsCode(GF16, 10, 2, tuple(range(1, 11)))
RS42 = GrsCode(GF5, 4, 2, (1, 2, 3, 4))


def worked_scheme():
    # m=3, M=1, n=6, k=2, t=1, J = servers 4..6 (0-based 3..5), second file
    return plain_scheme(C6, t=1, memory=1, m=3, desired=1, support=(3, 4, 5))


def test_storage_encode_examples():
    sysm = storage_encode((((0, 1),),), RS42)
    assert sysm.encoded[0][0] == (1, 2, 3, 4)
    zeros = storage_encode(
        tuple(tuple((0, 0) for _ in range(2)) for _ in range(2)), RS42)
    assert all(v == 0 for xi in zeros.encoded for f in xi for v in f)
    files = random_files(GF16, 3, 4, 2, derive_rng(0, "f"))
    sysm2 = storage_encode(files, C6)
    assert len(sysm2.encoded) == 4
    assert len(sysm2.encoded[0]) == 3
    assert len(sysm2.encoded[0][0]) == 6
    # re-encode check
    for xi in range(4):
        for s in range(3):
            assert sysm2.encoded[xi][s] == tuple(C6.encode(list(files[s][xi])))
    with pytest.raises(ShapeMismatch):
        storage_encode((((0, 1), (1,)),), RS42)


def test_boundary_stripes_are_zero():
    sysm = storage_encode((((0, 1),),), RS42)
    for xi in (-1, 0, 2, 3):
        assert sysm.stored_symbol(xi, 0, 0) == 0


def test_offset_matrix_rows():
    sch = worked_scheme()
    e = sch.e_offsets[0]
    assert e[0] == (0, 0, 0, 1, 1, 1)
    assert e[1] == tuple(
        GF16.pow(a, 2) if j >= 3 else 0 for j, a in enumerate(C6.locators))
    # offsets occupy query rows z*m + desired = 1 and 4
    qs = make_queries(sch, seed=42)
    for j in range(6):
        col = qs.queries[0][j]
        for row in range(6):
            off = e[0][j] if row == 1 else e[1][j] if row == 4 else 0
            assert col[row] == GF16.add(qs.d_rows[0][row][j], off)


def test_queries_reproducible_and_t1_constant():
    sch = worked_scheme()
    assert make_queries(sch, 7) == make_queries(sch, 7)
    assert make_queries(sch, 7) != make_queries(sch, 8)
    for row in make_queries(sch, 7).d_rows[0]:
        assert len(set(row)) == 1   # RS(n,1) is the repetition code


def test_byzantine_offsets_example3():
    sch = byzantine_scheme(C10, t=2, m=2, desired=0)
    e1, e2 = sch.e_offsets[0]
    assert e1 == tuple(GF16.pow(a, -2) for a in C10.locators)
    assert e2 == tuple(GF16.pow(a, 3) for a in C10.locators)


def test_scheme_validation():
    with pytest.raises(SupportTooSmall):
        plain_scheme(C6, 1, 1, 3, 0, (3,))
    with pytest.raises(SupportTooLarge):
        plain_scheme(C6, 1, 1, 3, 0, (0, 1, 2, 3, 4))
    with pytest.raises(SupportTooSmall):
        block_scheme(C6, 1, 1, 3, 3, 0, (4, 5))
    with pytest.raises(InvalidParams):
        byzantine_scheme(GrsCode(GF16, 7, 2, tuple(range(1, 8))), 2, 2, 0)
    with pytest.raises(InvalidParams):
        byzantine_scheme(GrsCode(GF16, 10, 2, tuple(range(0, 10))), 2, 2, 0)
    with pytest.raises(InvalidParams):
        plain_scheme(C6, 1, 1, 3, 5, (3, 4, 5))


def test_server_respond_m0_single_shot():
    sch = plain_scheme(RS42, t=1, memory=0, m=2, desired=0, support=(0, 1))
    files = random_files(GF5, 2, 1, 2, derive_rng(1, "f"))
    sysm = storage_encode(files, RS42)
    qs = make_queries(sch, 3)
    for j in range(4):
        got = server_respond(sysm, sch, qs.queries[0][j], 1, j)
        expect = 0
        for s in range(2):
            expect = GF5.add(expect, GF5.mul(qs.d_rows[0][s][j],
                                             sysm.stored_symbol(1, s, j)))
        expect = GF5.add(expect, GF5.mul(sch.e_offsets[0][0][j],
                                         sysm.stored_symbol(1, 0, j)))
        assert got == expect


def test_server_respond_naive_oracle():
    # independent brute-force dot product over the stacked stripes
    sch = worked_scheme()
    files = random_files(GF16, 3, 4, 2, derive_rng(2, "f"))
    sysm = storage_encode(files, C6)
    qs = make_queries(sch, 9)
    rng = random.Random(0)
    for _ in range(20):
        xi = rng.randrange(1, 6)
        j = rng.randrange(6)
        q = qs.queries[0][j]
        stacked = []
        for z in range(2):
            for s in range(3):
                stacked.append(sysm.stored_symbol(xi - z, s, j))
        expect = 0
        for a, b in zip(q, stacked):
            expect = GF16.add(expect, GF16.mul(a, b))
        assert server_respond(sysm, sch, q, xi, j) == expect


def test_run_protocol_lengths_and_determinism():
    sch = worked_scheme()
    files = random_files(GF16, 3, 4, 2, derive_rng(3, "f"))
    sysm = storage_encode(files, C6)
    st1 = run_protocol(sysm, sch, seed=5)
    st2 = run_protocol(sysm, sch, seed=5)
    assert st1 == st2
    assert len(st1.blocks) == 5
    assert st1.downloaded == 30
    schz = byzantine_scheme(C10, t=2, m=2, desired=0)
    filesz = random_files(GF16, 2, 3, 2, derive_rng(4, "f"))
    stz = run_protocol(storage_encode(filesz, C10), schz, seed=5)
    assert len(stz.blocks) == 4
    sch0 = plain_scheme(RS42, t=1, memory=0, m=2, desired=0, support=(0, 1))
    st0 = run_protocol(storage_encode(random_files(GF5, 2, 1, 2,
                                                   derive_rng(5, "f")), RS42),
                       sch0, seed=1)
    assert len(st0.blocks) == 1


def test_response_decomposition_invariant():
    # r_xi minus the desired-file offsets lies in the star-product code
    sch = worked_scheme()
    files = random_files(GF16, 3, 4, 2, derive_rng(6, "f"))
    sysm = storage_encode(files, C6)
    stream = run_protocol(sysm, sch, seed=8)
    star = sch.star_code()
    e = sch.e_offsets[0]
    for xi in range(1, 6):
        vec = list(stream.block(xi).part(0))
        for z in range(2):
            for j in range(6):
                y = sysm.stored_symbol(xi - z, 1, j)
                vec[j] = GF16.sub(vec[j], GF16.mul(e[z][j], y))
        assert star.contains(vec)


def test_offsets_vanish_outside_support():
    sch = worked_scheme()
    g = C6.generator_matrix()
    for z in range(2):
        for grow in g:
            prod = [GF16.mul(sch.e_offsets[0][z][j], grow[j]) for j in range(6)]
            assert all(prod[j] == 0 for j in range(6) if j not in sch.support)


def test_stream_csv_round_trip():
    sch = worked_scheme()
    files = random_files(GF16, 3, 4, 2, derive_rng(7, "f"))
    stream = run_protocol(storage_encode(files, C6), sch, seed=2)
    back = stream_from_csv(stream.to_csv(), 6, 4, 1)
    assert back.blocks == stream.blocks


def test_privacy_audit_instances():
    # q=5, n=4, t=1, m=2, M=0: 25 masking draws
    sch = plain_scheme(RS42, t=1, memory=0, m=2, desired=0, support=(0, 1))
    rep = privacy_audit(sch, (2,))
    assert rep.identical and rep.enumerated == 25
    assert set(rep.distributions[0].values()) == {1}   # uniform marginal
    # q=4, n=3, t=1, m=2, M=1: 256 draws
    gf4 = Field(2, 2)
    c3 = GrsCode(gf4, 3, 1, (1, 2, 3))
    sch4 = plain_scheme(c3, t=1, memory=1, m=2, desired=0, support=(0,))
    rep4 = privacy_audit(sch4, (0,))
    assert rep4.identical and rep4.enumerated == 256
    rep4b = privacy_audit(sch4, (2,))
    assert rep4b.identical


def test_privacy_audit_negative_control():
    broken = plain_scheme(
        C10, t=2, memory=0, m=2, desired=0, support=(5, 6),
        retrieval_code=GrsCode(GF16, 10, 1, tuple(range(1, 11))))
    rep = privacy_audit(broken, (4, 5))
    assert not rep.identical
    a, b, view, ca, cb = rep.witness
    assert (a, b) == (0, 1) and ca != cb
    honest = plain_scheme(C10, t=2, memory=0, m=2, desired=0, support=(5, 6))
    assert privacy_audit(honest, (4, 5)).identical


def test_privacy_audit_guards():
    sch = worked_scheme()
    with pytest.raises(AuditTooLarge):
        privacy_audit(sch, (0,))   # 16^6 draws
    sch0 = plain_scheme(RS42, t=1, memory=0, m=2, desired=0, support=(0, 1))
    with pytest.raises(InvalidParams):
        privacy_audit(sch0, (0, 1))   # |T| > t


def test_derive_seed_stable():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
    assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
    assert derive_seed(1, "a") != derive_seed(2, "a")
