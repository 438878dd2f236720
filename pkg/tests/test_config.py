import pytest

from vidmanet.config import build, dump_config, env_overrides, load_config, parse_lines
from vidmanet.errors import ConfigError
from vidmanet.scenario import Mobility, Protocol
from vidmanet.video import Concealment


def test_defaults():
    fc = load_config(environ={})
    s = fc.scenario
    assert (s.protocol, s.n_nodes, s.spacing, s.n_frames, s.fps, s.mtu) == (Protocol.AODV, 4, 20.0, 2000, 30.0, 1024)
    assert s.mac.retry_limit == 7 and s.dsdv.update_period == 15.0
    assert (fc.video.width, fc.video.height) == (352, 288)
    assert len(fc.grid.node_counts) == 7 and len(fc.grid.spacings) == 4


def test_file_values_and_sections(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("""
        protocol = dsdv     # case-insensitive enum
        n_nodes = 16
        mobility = outward
        concealment = zero_fill
        receiver = none
        mac.retry_limit = 4
        size.base_p = 1200
        video.width = 176
        grid.spacings = 20, 50
        grid.mobility = none
    """)
    fc = load_config(path, environ={})
    s = fc.scenario
    assert s.protocol is Protocol.DSDV and s.mobility is Mobility.OUTWARD
    assert s.concealment is Concealment.ZERO_FILL and s.receiver is None
    assert s.mac.retry_limit == 4 and s.size_model.base_p == 1200
    assert fc.video.width == 176
    assert fc.grid.spacings == (20.0, 50.0) and fc.grid.mobility == ()


@pytest.mark.parametrize("text", ["bogus = 1", "mac.nope = 2", "lasers.power = 3",
                                  "n_nodes = four", "mac = 3", "protocol = OLSR",
                                  "dsdv.update_period = 0"])
def test_rejected_values(text):
    with pytest.raises(ConfigError):
        build(parse_lines([text]))


def test_syntax_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match=r"cfg:2"):
        parse_lines(["a = 1", "no equals sign"], "cfg")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_lines(["a = 1", "A = 2"])


def test_environment_wins(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("mac.retry_limit = 4\nn_nodes = 9\n")
    env = {"VIDMANET_MAC__RETRY_LIMIT": "2", "VIDMANET_SEED": "42", "OTHER": "x"}
    assert env_overrides(env) == {"mac.retry_limit": "2", "seed": "42"}
    s = load_config(path, environ=env).scenario
    assert (s.mac.retry_limit, s.seed, s.n_nodes) == (2, 42, 9)


def test_dump_reads_back(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("protocol = DSDV\nspacing = 150\ngrid.protocols = AODV\naodv.ttl = 3\n")
    fc = load_config(path, environ={})
    again = tmp_path / "again.cfg"
    again.write_text(dump_config(fc))
    assert load_config(again, environ={}) == fc
