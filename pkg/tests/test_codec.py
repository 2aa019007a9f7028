import numpy as np
import pytest

from binrec.codec import (
    CodeFormat,
    CodeText,
    binary_string_to_code,
    code_to_binary_string,
    compress_dot_decimal,
    compression_stats,
    decompress_dot_decimal,
    parse_code_text,
    read_code_dump,
    render_code,
    write_code_dump,
)

GOLDEN_BINARY = "10101100000100001111111000000001"
GOLDEN_DOTTED = "172.16.254.1"


def random_binary(rng, length):
    return "".join(rng.choice(("0", "1"), size=length))


class TestBinaryString:
    def test_basic_render(self):
        assert code_to_binary_string([1, 0, 1]) == "101"

    def test_all_zero(self):
        assert code_to_binary_string(np.zeros(8, dtype=np.uint8)) == "00000000"

    def test_roundtrip_with_parser(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            bits = rng.integers(0, 2, size=rng.integers(1, 65))
            assert np.array_equal(binary_string_to_code(code_to_binary_string(bits)), bits)

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            code_to_binary_string([0, 2, 1])
        with pytest.raises(ValueError):
            binary_string_to_code("0102")


class TestCompress:
    def test_golden(self):
        assert compress_dot_decimal(GOLDEN_BINARY) == GOLDEN_DOTTED

    def test_zero_byte(self):
        assert compress_dot_decimal("00000000") == "0"

    def test_all_ones_byte(self):
        assert compress_dot_decimal("1111111100000001") == "255.1"

    def test_length_error_names_length(self):
        with pytest.raises(ValueError, match="12"):
            compress_dot_decimal("101010101010")

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            compress_dot_decimal("0000000a")


class TestDecompress:
    def test_golden(self):
        assert decompress_dot_decimal(GOLDEN_DOTTED) == GOLDEN_BINARY

    def test_zero(self):
        assert decompress_dot_decimal("0") == "00000000"

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            decompress_dot_decimal("256.1")

    def test_empty_group(self):
        with pytest.raises(ValueError):
            decompress_dot_decimal("172..1")
        with pytest.raises(ValueError):
            decompress_dot_decimal("")

    def test_non_digit(self):
        with pytest.raises(ValueError):
            decompress_dot_decimal("17a.1")


class TestRoundtrip:
    def test_roundtrip_property(self):
        # lengths 8..512 in steps of 8, many random draws
        rng = np.random.default_rng(1)
        for _ in range(2000):
            length = int(rng.integers(1, 65)) * 8
            binary = random_binary(rng, length)
            dotted = compress_dot_decimal(binary)
            assert decompress_dot_decimal(dotted) == binary
            assert compress_dot_decimal(decompress_dot_decimal(dotted)) == dotted

    def test_value_correctness_positional_oracle(self):
        # each group must equal sum(bit_k * 2^(7-k)) over its byte
        rng = np.random.default_rng(2)
        for _ in range(300):
            length = int(rng.integers(1, 17)) * 8
            binary = random_binary(rng, length)
            groups = compress_dot_decimal(binary).split(".")
            for g, group in enumerate(groups):
                byte = binary[8 * g : 8 * g + 8]
                expected = sum(int(byte[k]) * 2 ** (7 - k) for k in range(8))
                assert int(group) == expected

    def test_canonical_no_leading_zeros(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            binary = random_binary(rng, 64)
            for group in compress_dot_decimal(binary).split("."):
                assert group == str(int(group))

    def test_lenient_parse_of_leading_zeros(self):
        assert decompress_dot_decimal("016") == "00010000"


class TestRenderCode:
    def test_binary_length(self):
        rng = np.random.default_rng(4)
        code = rng.integers(0, 2, size=32)
        text = render_code(code, CodeFormat.BINARY)
        assert text.format is CodeFormat.BINARY
        assert len(text.text) == 32

    def test_dot_decimal_group_count(self):
        rng = np.random.default_rng(5)
        code = rng.integers(0, 2, size=32)
        text = render_code(code, "dot_decimal")
        assert text.text.count(".") == 3
        assert len(text.text) <= 15

    def test_width_not_multiple_of_8(self):
        with pytest.raises(ValueError):
            render_code(np.ones(12, dtype=np.uint8), CodeFormat.DOT_DECIMAL)

    def test_parse_code_text_roundtrip(self):
        rng = np.random.default_rng(6)
        code = rng.integers(0, 2, size=24).astype(np.uint8)
        for fmt in CodeFormat:
            assert np.array_equal(parse_code_text(render_code(code, fmt)), code)


class TestCodeText:
    def test_validates_binary(self):
        with pytest.raises(ValueError):
            CodeText("01a", CodeFormat.BINARY)

    def test_validates_dot_decimal(self):
        with pytest.raises(ValueError):
            CodeText("172..1", CodeFormat.DOT_DECIMAL)


class TestCompressionStats:
    def test_reduction_factor(self):
        rng = np.random.default_rng(7)
        stats = compression_stats(random_binary(rng, 256) for _ in range(1000))
        assert stats["mean_ratio_ignoring_dots"] >= 2.4
        assert stats["mean_ratio_with_dots"] > 1.5
        assert stats["mean_ratio_ignoring_dots"] > stats["mean_ratio_with_dots"]


class TestCodeDump:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(8)
        entries = [
            ("user", "u1", render_code(rng.integers(0, 2, size=16), "binary")),
            ("item", "i9", render_code(rng.integers(0, 2, size=16), "binary")),
        ]
        path = tmp_path / "codes.tsv"
        write_code_dump(path, entries, d=16)
        d, fmt, codes = read_code_dump(path)
        assert d == 16 and fmt is CodeFormat.BINARY
        assert codes[("user", "u1")] == entries[0][2]
        assert codes[("item", "i9")] == entries[1][2]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "codes.tsv"
        path.write_text("not a header\n")
        with pytest.raises(ValueError):
            read_code_dump(path)
