import numpy as np
import pytest

from pyqsense.sequence.model import PulseKind, cpmg, uhrig
from pyqsense.sequence.parser import (
    NonPositiveDelayError,
    SequenceSyntaxError,
    UnknownAxisError,
    format_duration,
    format_sequence,
    parse_sequence,
    read_sequence,
    write_sequence,
)


class TestSequenceParse(object):
    def test_hahn_file(self, hahn_seq_file):
        seq = read_sequence(hahn_seq_file)
        assert seq.name == "hahn"
        assert len(seq) == 5
        assert seq.total_time == pytest.approx(2e-6)
        assert seq.pi_times == pytest.approx([1e-6])
        assert seq.pulses[-1].axis == "-y"

    def test_one_line(self):
        seq = parse_sequence("p2 y; wait 250ns; p2 y")
        assert seq.total_time == pytest.approx(250e-9)

    def test_case_and_comments(self):
        seq = parse_sequence("# Ramsey\nP2 Y   # open\n\nWAIT 1US\np2 +y\n")
        assert len(seq) == 3
        assert seq.pulses[1].axis == "y"

    def test_arbitrary_rotation(self):
        seq = parse_sequence("p2 y\nwait 1us\nrot 0.5pi x 20ns\nwait 1us\np2 y")
        pulse = seq.pulses[1]
        assert pulse.kind is PulseKind.ARBITRARY
        assert pulse.angle == pytest.approx(np.pi / 2)
        assert pulse.duration == pytest.approx(20e-9)

    def test_microsign(self):
        assert parse_sequence("p2 y; wait 3µs; p2 y").total_time == pytest.approx(3e-6)

    def test_zero_wait(self):
        with pytest.raises(NonPositiveDelayError) as err:
            parse_sequence("p2 y\nwait 0us\np2 y")
        assert err.value.line == 2

    def test_unknown_axis(self):
        with pytest.raises(UnknownAxisError) as err:
            parse_sequence("p2 y\nwait 1us\npi w\np2 y")
        assert err.value.line == 3
        assert err.value.column == 4

    def test_missing_unit(self):
        with pytest.raises(SequenceSyntaxError) as err:
            parse_sequence("p2 y\nwait 1\np2 y")
        assert err.value.line == 2

    def test_unknown_keyword(self):
        with pytest.raises(SequenceSyntaxError) as err:
            parse_sequence("p2 y\nsleep 1us\np2 y")
        assert "line 2" in str(err.value)


class TestSequenceFormat(object):
    def test_format_cpmg(self):
        text = format_sequence(cpmg(2, 1e-6))
        assert text == "p2 y\nwait 0.5us\npi y\nwait 1us\npi y\nwait 0.5us\np2 y\n"

    def test_durations(self):
        assert format_duration(1e-6) == "1us"
        for seconds in (20e-9, 2.5e-3, 1.234567e-6, 3.0):
            text = f"p2 y; wait {format_duration(seconds)}; p2 y"
            assert parse_sequence(text).total_time == seconds

    def test_file_round_trip(self, tmp_path):
        seq = uhrig(5, 7.3e-6)
        path = write_sequence(tmp_path / "uhrig5.seq", seq)
        again = read_sequence(path)
        assert again == seq
