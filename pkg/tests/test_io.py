import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propmine.dataset import Dim
from propmine.errors import DataError
from propmine.io import (
    RESULT_FIELDS,
    IngestSpec,
    config_text,
    ingest,
    load_config,
    read_results,
    result_record,
    write_dataset_csv,
    write_results,
)
from propmine.miner import MinerConfig, mine


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_csv_duplicates_collapse(tmp_path, caplog):
    path = _write(tmp_path, "d.csv", "x,y,1\nx,y,1\nz,y,2\n")
    d = ingest(path)
    assert len(d) == 2
    assert d.labels == (("x", "z"), ("y",), ("1", "2"))
    assert "duplicate" in caplog.text


def test_csv_columns_and_header(tmp_path):
    path = _write(tmp_path, "d.csv", "time,src,dst\n5,p,q\n")
    d = ingest(path, IngestSpec(columns=(1, 2, 0), header=True))
    assert d.labels == (("p",), ("q",), ("5",))


def test_csv_binned_timestamps(tmp_path):
    path = _write(tmp_path, "d.csv", "p,q,100\np,q,130\np,q,170\n")
    d = ingest(path, IngestSpec(time_bin_seconds=60))
    assert d.labels[2] == ("0", "1")
    assert len(d) == 2


def test_tij_binning_symmetrize_and_roles(tmp_path, caplog):
    text = "20 1 2 NUR PAT\n40 1 2 NUR PAT\n80 2 3 PAT MED\n100 4 4 ADM ADM\n"
    d = ingest(_write(tmp_path, "c.dat", text), IngestSpec(format="tij"))
    # t0 = 20: bins 0, 0, 1, 1; the self pair is dropped
    assert d.shared_ab
    assert d.labels[2] == ("0", "1")
    labels = {(d.label(Dim.A, a), d.label(Dim.B, b), d.label(Dim.C, c)) for a, b, c in d.triplets}
    assert labels == {("1", "2", "0"), ("2", "1", "0"), ("2", "3", "1"), ("3", "2", "1")}
    roles = {d.label(Dim.A, i): r for i, r in d.metadata[0].items()}
    assert roles["1"] == "NUR" and roles["3"] == "MED"
    assert "self-pair" in caplog.text
    assert "duplicate" not in caplog.text


@pytest.mark.parametrize("text,line", [
    ("20 1 2\n40 1\n", 2),
    ("20 1 2\nlate 1 2\n", 2),
    ("\n\n20 1 2 X\n", 3),
])
def test_tij_malformed_rows_report_line(tmp_path, text, line):
    with pytest.raises(DataError) as info:
        ingest(_write(tmp_path, "bad.tij", text), IngestSpec(format="tij"))
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_role_map_file(tmp_path, caplog):
    roles = _write(tmp_path, "roles.csv", "id,role\n1,NUR\n2,XYZ\n9,MED\n")
    d = ingest(_write(tmp_path, "c.tij", "0 1 2\n"), IngestSpec(format="tij", role_map_file=str(roles)))
    meta = {d.label(Dim.A, i): r for i, r in d.metadata[0].items()}
    assert meta == {"1": "NUR", "2": "XYZ"}
    assert "unknown role" in caplog.text
    assert "unknown element 9" in caplog.text


def test_ingest_is_idempotent(tmp_path):
    src = _write(tmp_path, "c.tij", "0 1 2\n20 2 3\n60 3 1\n80 1 2\n")
    d = ingest(src, IngestSpec(format="tij"))
    out = tmp_path / "canon.csv"
    write_dataset_csv(d, out)
    again = ingest(out, IngestSpec(shared_ab=True))
    write_dataset_csv(again, tmp_path / "canon2.csv")
    assert out.read_text() == (tmp_path / "canon2.csv").read_text()
    assert again.triplets == d.triplets


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_binning_ignores_order_and_intra_bin_repeats(tmp_path_factory, width, shift, rng):
    tmp = tmp_path_factory.mktemp("bins")
    rows = [(rng.randrange(0, 200), rng.randrange(5), rng.randrange(5)) for _ in range(30)]
    rows = [(t + shift, i, j) for t, i, j in rows if i != j]
    if not rows:
        return
    t0 = min(t for t, _, _ in rows)
    shuffled = rows[:]
    rng.shuffle(shuffled)
    # shifting a row inside its own bin must not change the dataset
    moved = [(t0 + ((t - t0) // width) * width, i, j) for t, i, j in shuffled]
    a = ingest(_write(tmp, "a.tij", "".join(f"{t} {i} {j}\n" for t, i, j in rows)),
               IngestSpec(format="tij", time_bin_seconds=width, t0=t0))
    b = ingest(_write(tmp, "b.tij", "".join(f"{t} {i} {j}\n" for t, i, j in moved)),
               IngestSpec(format="tij", time_bin_seconds=width, t0=t0))
    assert a == b


def test_results_round_trip_and_field_order(tmp_path):
    block = [(f"p{a}", f"q{b}", str(c)) for a in range(2) for b in range(2) for c in range(2)]
    path = _write(tmp_path, "d.csv", "".join(",".join(r) + "\n" for r in block))
    d = ingest(path)
    result = mine(d, MinerConfig())
    records = [result_record(m, d) for m in result.propositions]
    assert list(records[0]) == list(RESULT_FIELDS)
    assert records[0]["proposition"] == "1 A{p0,p1} are 1 B{q0,q1} and C{0,1}"
    for fmt in ("jsonl", "csv"):
        out = tmp_path / f"r.{fmt}"
        assert write_results(records, out, fmt) == 1
        assert read_results(out, fmt) == records


def test_empty_results(tmp_path):
    for fmt in ("jsonl", "csv"):
        out = tmp_path / f"e.{fmt}"
        assert write_results([], out, fmt) == 0
        assert out.read_text() == ""
        assert read_results(out, fmt) == []
    with pytest.raises(ValueError):
        write_results([], tmp_path / "x", "xml")


def test_config_files(tmp_path):
    cfg = MinerConfig(x_min="3/4", subject_dim="c", loopless=True)
    miner, ingest_opts = load_config(_write(tmp_path, "a.cfg", config_text(cfg)))
    assert MinerConfig.from_mapping(miner) == cfg
    assert ingest_opts == {}
    miner, ingest_opts = load_config(_write(tmp_path, "b.cfg", "[miner]\ny_min = 0.6\n[ingest]\nbin_seconds = 20\n"))
    assert miner == {"y_min": "0.6"} and ingest_opts == {"bin_seconds": "20"}
    with pytest.raises(ValueError):
        load_config(_write(tmp_path, "c.cfg", "[other]\nk = v\n"))


def test_ingest_spec_defaults():
    tij = IngestSpec(format="tij")
    assert (tij.symmetrize, tij.drop_self_pairs, tij.shared_ab, tij.time_bin_seconds) == (True, True, True, 60)
    csv_spec = IngestSpec()
    assert (csv_spec.symmetrize, csv_spec.shared_ab, csv_spec.time_bin_seconds) == (False, False, None)
    with pytest.raises(ValueError):
        IngestSpec(format="xls")
    with pytest.raises(ValueError):
        IngestSpec(columns=(0, 0, 1))


def test_csv_is_not_order_sensitive(tmp_path):
    rows = [f"{random.Random(i).randrange(9)},{i % 4},{i % 3}\n" for i in range(40)]
    a = ingest(_write(tmp_path, "a.csv", "".join(rows)))
    b = ingest(_write(tmp_path, "b.csv", "".join(reversed(rows))))
    assert a == b
