"""Container format and command-line interface tests."""

import pytest

from combicodec.cli import main
from combicodec.codecs import CodingContext, encode
from combicodec.container import (
    Container,
    context_checksum,
    pack,
    read_varint,
    write_varint,
)
from combicodec.errors import ContainerError
from combicodec.models import Alphabet, SourceDistribution


def varint_roundtrip(value):
    data = write_varint(value)
    decoded, pos = read_varint(data, 0)
    assert pos == len(data)
    return decoded


class TestContainer:
    def make(self):
        ctx = CodingContext(
            alphabet=Alphabet(("A", "B")),
            model="seq",
            source=SourceDistribution.from_weights({"A": 1, "B": 1}),
            n=4,
        )
        blob = encode(ctx, ("A", "B", "A", "A"))
        return ctx, blob

    @pytest.mark.parametrize("value", [0, 1, 127, 128, 300, 2**40])
    def test_varint_roundtrip(self, value):
        assert varint_roundtrip(value) == value

    def test_container_roundtrip(self):
        ctx, blob = self.make()
        box = pack(ctx, blob)
        data = box.to_bytes()
        assert data[:4] == b"CMB1"
        restored = Container.from_bytes(data)
        assert restored.model == "seq"
        assert restored.n == 4
        assert restored.blob == blob
        restored.check_context(ctx)  # same context: no error

    def test_checksum_detects_different_context(self):
        ctx, blob = self.make()
        other = CodingContext(
            alphabet=Alphabet(("A", "B")),
            model="seq",
            source=SourceDistribution.from_weights({"A": 3, "B": 1}),
            n=4,
        )
        assert context_checksum(ctx) != context_checksum(other)
        with pytest.raises(ContainerError):
            pack(ctx, blob).check_context(other)

    def test_corrupt_inputs_rejected(self):
        ctx, blob = self.make()
        data = pack(ctx, blob).to_bytes()
        with pytest.raises(ContainerError):
            Container.from_bytes(b"NOPE" + data[4:])
        with pytest.raises(ContainerError):
            Container.from_bytes(data[:-1])  # truncated payload
        with pytest.raises(ContainerError):
            Container.from_bytes(data + b"\x00")  # trailing garbage
        with pytest.raises(ContainerError):
            Container.from_bytes(b"CMB1")

    def test_checksum_covers_resolution(self):
        ctx, _ = self.make()
        coarse = CodingContext(
            alphabet=ctx.alphabet, model="seq", source=ctx.source, n=4, freq_bits=16
        )
        assert context_checksum(ctx) != context_checksum(coarse)


@pytest.fixture
def files(tmp_path):
    paths = {
        "alphabet": tmp_path / "alphabet.txt",
        "dist": tmp_path / "dist.txt",
        "alpha": tmp_path / "alpha.txt",
        "given": tmp_path / "given.txt",
        "input": tmp_path / "input.txt",
        "packed": tmp_path / "out.cmb",
        "decoded": tmp_path / "decoded.txt",
    }
    paths["alphabet"].write_text("X Y Z\n")
    paths["dist"].write_text("X 1\nY 1\nZ 2\n")
    paths["alpha"].write_text("X 1/2\nY 1\nZ 2\n")
    paths["given"].write_text("X Y Z\n")
    return paths


def run(args):
    return main([str(a) for a in args])


class TestCli:
    def test_encode_decode_permutation(self, files, capsys):
        files["input"].write_text("Z X Y\n")
        code = run(
            ["encode", "--model", "perm", "--alphabet", files["alphabet"],
             "--given-multiset", files["given"], "--input", files["input"],
             "--output", files["packed"]]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("bits=")
        assert "ic=2.584962500721156" in out  # log2(6)
        code = run(
            ["decode", "--model", "perm", "--alphabet", files["alphabet"],
             "--given-multiset", files["given"], "--input", files["packed"],
             "--output", files["decoded"]]
        )
        assert code == 0
        assert files["decoded"].read_text() == "Z X Y\n"

    def test_encode_decode_multiset(self, files, capsys):
        files["input"].write_text("Z X Z Z\n")
        run(
            ["encode", "--model", "multiset", "--alphabet", files["alphabet"],
             "--dist", files["dist"], "--input", files["input"],
             "--output", files["packed"]]
        )
        run(
            ["decode", "--model", "multiset", "--alphabet", files["alphabet"],
             "--dist", files["dist"], "--input", files["packed"],
             "--output", files["decoded"]]
        )
        # multisets come back in alphabet order
        assert files["decoded"].read_text() == "X Z Z Z\n"

    def test_info_matches_encode(self, files, capsys):
        files["input"].write_text("X Y Z X\n")
        run(["info", "--model", "adaptive_seq", "--alphabet", files["alphabet"],
             "--alpha", files["alpha"], "--input", files["input"]])
        out = capsys.readouterr().out
        assert out.startswith("ic=")
        float(out.strip().split("=")[1])  # parses as a number

    def test_unknown_token_is_a_data_error(self, files, capsys):
        files["input"].write_text("X Q\n")
        code = run(["info", "--model", "seq", "--alphabet", files["alphabet"],
                    "--dist", files["dist"], "--input", files["input"]])
        assert code == 2
        assert "not in the alphabet" in capsys.readouterr().err

    def test_missing_required_dist(self, files, capsys):
        files["input"].write_text("X\n")
        code = run(["info", "--model", "seq", "--alphabet", files["alphabet"],
                    "--input", files["input"]])
        assert code == 2
        assert "--dist" in capsys.readouterr().err

    def test_missing_file(self, files, capsys):
        code = run(["info", "--model", "uniform_ms", "--alphabet", files["alphabet"],
                    "--input", files["input"].parent / "nope.txt"])
        assert code == 2

    def test_decode_tamper_detected(self, files, capsys):
        files["input"].write_text("X Y\n")
        run(["encode", "--model", "seq", "--alphabet", files["alphabet"],
             "--dist", files["dist"], "--input", files["input"],
             "--output", files["packed"]])
        capsys.readouterr()
        # decoding with a different source distribution must be refused
        files["dist"].write_text("X 5\nY 1\nZ 2\n")
        code = run(["decode", "--model", "seq", "--alphabet", files["alphabet"],
                    "--dist", files["dist"], "--input", files["packed"],
                    "--output", files["decoded"]])
        assert code == 2
        assert "context mismatch" in capsys.readouterr().err

    def test_decode_model_mismatch(self, files, capsys):
        files["input"].write_text("X Y\n")
        run(["encode", "--model", "seq", "--alphabet", files["alphabet"],
             "--dist", files["dist"], "--input", files["input"],
             "--output", files["packed"]])
        code = run(["decode", "--model", "multiset", "--alphabet", files["alphabet"],
                    "--dist", files["dist"], "--input", files["packed"],
                    "--output", files["decoded"]])
        assert code == 2
        assert "model mismatch" in capsys.readouterr().err

    def test_k_derived_and_checked(self, files, capsys):
        files["input"].write_text("X Y\n")
        code = run(["encode", "--model", "trunc_perm", "--alphabet", files["alphabet"],
                    "--given-multiset", files["given"], "--input", files["input"],
                    "--output", files["packed"]])
        assert code == 0
        code = run(["encode", "--model", "trunc_perm", "--alphabet", files["alphabet"],
                    "--given-multiset", files["given"], "--k", "3",
                    "--input", files["input"], "--output", files["packed"]])
        assert code == 2
        assert "does not match" in capsys.readouterr().err

    def test_usage_error_exits_one(self, files):
        with pytest.raises(SystemExit) as exc:
            run(["encode", "--model", "seq"])
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            run(["squash"])
        assert exc.value.code == 1

    def test_selftest_passes(self, capsys):
        assert run(["selftest", "--trials", "5", "--max-n", "4",
                    "--max-alphabet", "2"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out

    def test_selftest_reports_injected_fault(self, capsys):
        assert run(["selftest", "--trials", "2", "--inject-fault"]) == 3
