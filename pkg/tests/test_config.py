import json

from pytest import raises as assert_raises

from bethe.model import GenericRational, Twist, XXXChain
from cli.cli_exception import ConfigError
from cli.config import RUN_CONFIG_SCHEMA, ModelKind, OutputFormat, load_config, parse_config, schema_at, with_overrides


def minimal(**extra):
    document = {"model": {"kind": "chain", "c": 1, "xi": [0, 0.3]}}
    document.update(extra)
    return document


class TestParse:
    def test_defaults(self):
        config = parse_config(minimal())
        assert config.model.kind is ModelKind.CHAIN
        assert config.sector == (1, 0)
        assert config.twist.is_identity
        assert config.task.s == (1, 2, 3)
        assert config.output.format is OutputFormat.JSON
        assert isinstance(config.model.build(), XXXChain)

    def test_complex_values(self):
        config = parse_config(minimal(twist=[[1, 0.1], 1, 1], task={"z": [[0.5, -0.5], 2]}))
        assert config.twist == Twist(1 + 0.1j, 1, 1)
        assert config.task.z == (0.5 - 0.5j, 2)

    def test_homogeneous_chain(self):
        config = parse_config({"model": {"kind": "chain", "c": 1, "L": 3}})
        assert len(config.model.xi) == 3

    def test_generic_model(self):
        config = parse_config({"model": {"kind": "generic", "c": 1, "r1": {"zeros": [0.5], "poles": [-0.5]}}})
        model = config.model.build()
        assert isinstance(model, GenericRational)
        assert model.r1.zeros == (0.5,)

    def test_solver_seeds(self):
        config = parse_config(minimal(sector=[1, 0], solver={"seeds": [{"u": [-0.3]}], "n_random": 0}))
        assert config.solver.seeds == (((-0.3,), ()),)
        assert config.solver.n_random == 0

    def test_generic_sector_may_have_more_v_roots(self):
        config = parse_config({"model": {"kind": "generic", "c": 1, "r3": {"zeros": [0.3], "poles": [0.9], "scale": [1.5, 0]}}, "sector": [0, 1]})
        assert config.sector == (0, 1)
        assert config.model.r3.scale == 1.5

    def test_task_pairs(self):
        config = parse_config(minimal(task={"pairs": [["s0", "s1"]], "sites": [1, 2]}))
        assert config.task.pairs == (("s0", "s1"),)
        assert config.task.sites == (1, 2)


class TestErrors:
    def check(self, document, path):
        with assert_raises(ConfigError) as info:
            parse_config(document)
        assert info.value.path == path

    def test_paths(self):
        self.check({}, "$.model")
        self.check(minimal(extra=1), "$.extra")
        self.check({"model": {"kind": "chain", "c": 1, "xi": [0, [1, "a"]]}}, "$.model.xi[1]")
        self.check({"model": {"kind": "chain", "c": 1, "xi": [0, 0]}}, "$.model.xi[1]")
        self.check({"model": {"kind": "lattice", "c": 1}}, "$.model.kind")
        self.check({"model": {"kind": "chain", "c": 0, "xi": [0]}}, "$.model.c")
        self.check({"model": {"kind": "generic", "c": 1, "xi": [0]}}, "$.model.xi")
        self.check(minimal(sector=[0, 1]), "$.sector[1]")
        self.check(minimal(sector=[3, 0]), "$.sector[0]")
        self.check(minimal(twist=[1, 0, 1]), "$.twist[1]")
        self.check(minimal(task={"s": [4]}), "$.task.s[0]")
        self.check(minimal(solver={"seeds": [{"u": [0.1, 0.2]}]}), "$.solver.seeds[0].u")
        self.check(minimal(output={"format": "xml"}), "$.output.format")
        self.check({"model": {"kind": "generic", "c": 1, "r1": {"scale": "2"}}}, "$.model.r1.scale")
        self.check({"model": {"kind": "generic", "c": 1, "r1": {"scale": 0}}}, "$.model.r1.scale")
        self.check(minimal(task={"lemma_n": 9}), "$.task.lemma_n")
        self.check(minimal(seed=-1), "$.seed")

    def test_unknown_field_at_every_level(self):
        self.check(minimal(extra=1), "$.extra")
        self.check({"model": {"kind": "chain", "c": 1, "xi": [0], "extra": 1}}, "$.model.extra")
        self.check({"model": {"kind": "generic", "c": 1, "r3": {"extra": 1}}}, "$.model.r3.extra")
        self.check(minimal(solver={"extra": 1}), "$.solver.extra")
        self.check(minimal(solver={"seeds": [{"u": [0.1], "w": [0.2]}]}), "$.solver.seeds[0].w")
        self.check(minimal(task={"extra": 1}), "$.task.extra")
        self.check(minimal(output={"extra": 1}), "$.output.extra")

    def test_unreadable_file(self, tmp_path):
        with assert_raises(ConfigError):
            load_config(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{", encoding="utf-8")
        with assert_raises(ConfigError) as info:
            load_config(broken)
        assert "line 1" in str(info.value)


class TestOverrides:
    def test_flags_win(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(minimal(seed=3)), encoding="utf-8")
        config = with_overrides(load_config(path), seed=9, out="report.csv", fmt="csv")
        assert config.seed == 9
        assert config.output.path == "report.csv"
        assert config.output.format is OutputFormat.CSV

    def test_schema_lists_every_section(self):
        assert set(RUN_CONFIG_SCHEMA["properties"]) == {"model", "sector", "twist", "solver", "task", "output", "seed"}
        json.dumps(RUN_CONFIG_SCHEMA)

    def test_schema_closes_every_object(self):
        def objects(node):
            if isinstance(node, dict):
                if node.get("type") == "object":
                    yield node
                for value in node.values():
                    yield from objects(value)
            elif isinstance(node, list):
                for value in node:
                    yield from objects(value)

        found = list(objects(RUN_CONFIG_SCHEMA))
        assert len(found) >= 6
        assert all(node.get("additionalProperties") is False for node in found)

    def test_validator_follows_the_schema(self):
        assert set(schema_at("solver", "seeds", "items")["properties"]) == {"u", "v"}
        assert schema_at("task", "lemma_n")["maximum"] == 8
        parse_config(minimal(task={"lemma_n": schema_at("task", "lemma_n")["maximum"]}))
