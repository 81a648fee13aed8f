import json
from pathlib import Path

import pytest

from kemscope.mlkem_core import ML_KEM_512, ML_KEM_768, KatParseError, acvp_to_records, kat, keygen, parse_kat, validate_kat

SHIPPED = ["mlkem512_kat.txt", "mlkem768_kat.txt", "mlkem1024_kat.txt"]


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_vectors_pass(data_dir, name):
    report = validate_kat(data_dir / name)
    assert report.ok, report.failures
    assert len(report.results) == 10 * 6


def _official_dir() -> Path:
    vectors = pytest.importorskip("cryptography_vectors")
    return Path(vectors.__file__).parent / "asymmetric" / "MLKEM"


@pytest.mark.parametrize("size", [512, 768, 1024])
def test_official_vector_sets(size):
    report = validate_kat(_official_dir() / f"kat_MLKEM_{size}.rsp")
    assert report.ok, report.failures[:3]
    assert len({r.vector for r in report.results}) == 1000


def test_shipped_vectors_are_prefix_of_official(data_dir):
    ours = parse_kat((data_dir / "mlkem768_kat.txt").read_text())
    official = kat.load_kat(_official_dir() / "kat_MLKEM_768.rsp")
    for a, b in zip(ours, official):
        assert a.fields == {k: b.fields[k] for k in a.fields}


def _corrupt(text: str, field: str, which: int) -> str:
    lines = text.splitlines()
    hits = [i for i, line in enumerate(lines) if line.startswith(f"{field} =")]
    i = hits[which]
    key, value = lines[i].split(" = ")
    flipped = format(int(value[-2:], 16) ^ 1, "02x")
    lines[i] = f"{key} = {value[:-2]}{flipped}"
    return "\n".join(lines) + "\n"


def test_corrupted_ciphertext_is_caught(data_dir, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text(_corrupt((data_dir / "mlkem512_kat.txt").read_text(), "ct", 3))
    report = validate_kat(bad)
    assert not report.ok
    assert report.failing_vectors == [3]
    # encaps output no longer matches, and decaps of the tampered ct rejects implicitly
    assert {r.stage for r in report.failures} == {"encaps", "decaps"}


def test_corrupted_key_is_caught(data_dir, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text(_corrupt((data_dir / "mlkem768_kat.txt").read_text(), "ek", 0))
    report = validate_kat(bad)
    assert report.failing_vectors == [0]


def test_empty_file_is_an_error(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    with pytest.raises(KatParseError) as info:
        validate_kat(empty)
    assert info.value.line == 1


@pytest.mark.parametrize("text,line", [
    ("count = 0\nd = zz\n", 2),
    ("count = 0\nd = 00\nthis is not a field\n", 3),
    ("count = 0\nd = 0\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(KatParseError) as info:
        parse_kat(text)
    assert info.value.line == line


def test_parse_aliases_comments_and_sections():
    text = "# header\n[ML-KEM-512]\ncount = 0\npk = 00ff\nsk = 11\n\ncount = 1\npk = 22\n"
    vectors = parse_kat(text)
    assert [v.index for v in vectors] == [0, 1]
    assert vectors[0].fields["ek"] == b"\x00\xff" and vectors[0].fields["dk"] == b"\x11"
    assert vectors[0].params_hint == "ML-KEM-512"


def test_acvp_mapping():
    pair = keygen(ML_KEM_512, bytes(64))
    doc = {"testGroups": [{"parameterSet": "ML-KEM-512", "tests": [
        {"tcId": 1, "d": "00" * 32, "z": "00" * 32, "ek": pair.encaps_key.hex(), "dk": pair.decaps_key.hex()},
    ]}]}
    vectors = acvp_to_records(json.dumps(doc))
    report = kat.validate_vectors(vectors)
    assert report.ok and vectors[0].index == 1


def test_format_round_trip(data_dir):
    vectors = parse_kat((data_dir / "mlkem768_kat.txt").read_text())
    again = parse_kat(kat.format_kat(vectors))
    assert [v.fields for v in again] == [v.fields for v in vectors]
    assert kat.validate_vectors(again, ML_KEM_768).ok
