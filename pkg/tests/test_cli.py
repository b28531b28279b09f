from ncpoly.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_family_pal_bytes(tmp_path, capsys):
    out = tmp_path / "pal.txt"
    code, _, _ = run(capsys, "family", "pal:n=1", "--out", str(out))
    assert code == 0
    assert out.read_text() == "1 x0 x0\n1 x1 x1\n"


def test_family_dyck_and_per_counts(tmp_path, capsys):
    out = tmp_path / "d.txt"
    assert run(capsys, "family", "dyck:k=2,d=4", "--out", str(out))[0] == 0
    assert len(out.read_text().splitlines()) == 8
    assert run(capsys, "family", "per:n=2", "--out", str(out))[0] == 0
    assert len(out.read_text().splitlines()) == 2


def test_family_unknown_exits_2(capsys):
    code, _, err = run(capsys, "family", "bogus:n=1")
    assert code == 2
    assert "unknown family" in err


def test_expand(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 input x1\ng1 input x2\ng2 mul g0 g1\noutput g2\n")
    out = tmp_path / "e.txt"
    code, _, _ = run(capsys, "expand", str(circ), "--out", str(out))
    assert code == 0
    assert out.read_text() == "1 x1 x2\n"


def test_reduce_and_verify_pal_d2(tmp_path, capsys):
    red = tmp_path / "r.txt"
    code, _, _ = run(capsys, "reduce", "pal-d2", "n=2", "--out", str(red))
    assert code == 0
    code, out, _ = run(capsys, "verify", str(red))
    assert code == 0
    assert "verdict pass" in out


def test_verify_corrupted_exits_1(tmp_path, capsys):
    red = tmp_path / "r.txt"
    run(capsys, "reduce", "pal-d2", "n=1", "--out", str(red))
    text = red.read_text()
    # double one live entry coefficient
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("entry "):
            parts = line.split()
            parts[3] = "2"
            lines[i] = " ".join(parts)
            break
    red.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", str(red))
    assert code == 1
    assert "witness" in out


def test_verify_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "verify", "/nonexistent/file.txt")
    assert code == 2
    assert err


def test_reduce_dyck_complete_roundtrip(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 input x1\ng1 input x2\ng2 mul g0 g1\ng3 mul g1 g0\ng4 add g2 g3\noutput g4\n")
    red = tmp_path / "r.txt"
    assert run(capsys, "reduce", "dyck-complete", f"circuit={circ}", "--out", str(red))[0] == 0
    code, out, _ = run(capsys, "verify", str(red))
    assert code == 0 and "verdict pass" in out


def test_reduce_pal_vsk_roundtrip(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 const 3\ng1 input x1\ng2 mul g0 g1\noutput g2\n")
    red = tmp_path / "r.txt"
    assert run(capsys, "reduce", "pal-vsk", f"circuit={circ}", "--out", str(red))[0] == 0
    assert run(capsys, "verify", str(red))[0] == 0


def test_reduce_per_family_kinds(tmp_path, capsys):
    red = tmp_path / "r.txt"
    for kind, params in [
        ("per-idstar", ["n=2"]),
        ("palsq-d2", ["n=1"]),
        ("dk-d2", ["k=3", "d=2"]),
        ("depth", ["k1=1", "k2=2", "n=2"]),
        ("hier-iproj", ["i=1", "n=1"]),
    ]:
        assert run(capsys, "reduce", kind, *params, "--out", str(red))[0] == 0
        code, out, _ = run(capsys, "verify", str(red))
        assert code == 0, (kind, out)


def test_reduce_per_chi(tmp_path, capsys):
    chi = tmp_path / "chi.txt"
    chi.write_text("1 2 -> 2\n2 1 -> 3\n")
    red = tmp_path / "r.txt"
    assert run(capsys, "reduce", "per-chi", "n=2", f"chi={chi}", "--out", str(red))[0] == 0
    assert run(capsys, "verify", str(red))[0] == 0


def test_reduce_vbp_trivial(tmp_path, capsys):
    abp = tmp_path / "p.txt"
    # one-pair balanced words of length 4 as a branching program
    abp.write_text(
        "layers 0:1 1:1 2:2 3:1 4:1\n"
        "edge 0 0 0 1 (1\n"
        "edge 1 0 0 1 (1\n"
        "edge 1 0 1 1 )1\n"
        "edge 2 0 0 1 )1\n"
        "edge 2 1 0 1 (1\n"
        "edge 3 0 0 1 )1\n"
    )
    red = tmp_path / "r.txt"
    code, _, err = run(
        capsys,
        "reduce",
        "vbp-trivial",
        f"abp={abp}",
        "target=pal:n=2",
        "witness=x0,x0,x0,x0",
        "--out",
        str(red),
    )
    assert code == 0, err
    assert run(capsys, "verify", str(red))[0] == 0


def test_rank_table(capsys):
    code, out, _ = run(capsys, "rank", "pal:n=3", "--cut", "3")
    assert code == 0 and out == "3 8\n"
    code, out, _ = run(capsys, "rank", "id:n=3", "--cut", "3")
    assert code == 0 and out == "3 8\n"
    code, out, _ = run(capsys, "rank", "dyckdepth:k=1,n=3", "--cut", "3")
    assert code == 0
    assert int(out.split()[1]) == 2
    code, out, _ = run(capsys, "--format", "structured", "rank", "pal:n=2", "--cut", "2")
    assert out == "cut=2 rank=4\n"


def test_hadamard_command(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 input x0\ng1 input x1\ng2 add g0 g1\ng3 mul g2 g2\noutput g3\n")
    abp = tmp_path / "g.txt"
    abp.write_text(
        "layers 0:1 1:2 2:1\n"
        "edge 0 0 0 1 x0\n"
        "edge 0 0 1 1 x1\n"
        "edge 1 0 0 1 x0\n"
        "edge 1 1 0 1 x1\n"
    )
    out = tmp_path / "h.txt"
    code, _, err = run(capsys, "hadamard", "--circuit", str(circ), "--abp", str(abp), "--out", str(out))
    assert code == 0, err
    assert out.read_text() == "1 x0 x0\n1 x1 x1\n"


def test_compose_command(tmp_path, capsys):
    r1 = tmp_path / "r1.txt"
    run(capsys, "reduce", "pal-d2", "n=2", "--out", str(r1))
    # identity lift of the target family, built through the depth reduction
    r2 = tmp_path / "r2.txt"
    run(capsys, "reduce", "depth", "k1=2", "k2=2", "n=2", "--out", str(r2))
    out = tmp_path / "c.txt"
    code, _, err = run(capsys, "compose", str(r1), str(r2), "--out", str(out))
    assert code == 0, err
    code, msg, _ = run(capsys, "verify", str(out), "--source", "pal:n=2", "--target", "dyckdepth:k=2,n=2")
    assert code == 0, msg


def test_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "reduce", "per-idstar", "n=2", "--out", str(a))
    run(capsys, "reduce", "per-idstar", "n=2", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    run(capsys, "family", "dyck:k=2,d=6", "--out", str(a))
    run(capsys, "family", "dyck:k=2,d=6", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_prime_field_flag(tmp_path, capsys):
    out = tmp_path / "p.txt"
    code, _, _ = run(capsys, "--field", "p=7", "family", "pal:n=1", "--out", str(out))
    assert code == 0
    assert out.read_text() == "1 x0 x0\n1 x1 x1\n"
    red = tmp_path / "r.txt"
    assert run(capsys, "--field", "p=7", "reduce", "pal-d2", "n=2", "--out", str(red))[0] == 0
    assert run(capsys, "--field", "p=7", "verify", str(red))[0] == 0


def test_term_budget_flag(capsys):
    code, _, err = run(capsys, "--term-budget", "10", "family", "dyck:k=2,d=8")
    assert code == 2
    assert "terms" in err


def test_verify_source_overrides(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 input x1\ng1 input x2\ng2 mul g0 g1\noutput g2\n")
    red = tmp_path / "r.txt"
    run(capsys, "reduce", "dyck-complete", f"circuit={circ}", "--out", str(red))
    # explicit circuit source
    assert run(capsys, "verify", str(red), "--source", f"circuit:{circ}")[0] == 0
    # explicit polynomial source
    poly = tmp_path / "p.txt"
    run(capsys, "expand", str(circ), "--out", str(poly))
    assert run(capsys, "verify", str(red), "--source", f"poly:{poly}")[0] == 0
    # a wrong polynomial source must fail with exit 1
    poly.write_text("1 x2 x1\n")
    code, out, _ = run(capsys, "verify", str(red), "--source", f"poly:{poly}")
    assert code == 1 and "witness" in out


def test_per_chi_over_prime_field(tmp_path, capsys):
    chi = tmp_path / "chi.txt"
    chi.write_text("1 2 -> 2\n2 1 -> 3\n")
    red = tmp_path / "r.txt"
    assert run(capsys, "--field", "p=11", "reduce", "per-chi", "n=2", f"chi={chi}", "--out", str(red))[0] == 0
    assert run(capsys, "--field", "p=11", "verify", str(red))[0] == 0
    # a chi value that is zero mod p is rejected up front
    chi.write_text("1 2 -> 11\n2 1 -> 3\n")
    code, _, err = run(capsys, "--field", "p=11", "reduce", "per-chi", "n=2", f"chi={chi}", "--out", str(red))
    assert code == 2 and "zero" in err
