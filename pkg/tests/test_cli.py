import json

import pytest

from costnet import cli
from costnet.metrics import ConfusionMatrix, scores


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def toy_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    train_csv = root / "train.csv"
    test_csv = root / "test.csv"
    assert cli.main([
        "gen-data", "--use-case", "dga", "--legit", "60", "--malicious", "60",
        "--seed", "5", "--split", "train", "--out", str(train_csv),
    ]) == 0
    assert cli.main([
        "gen-data", "--use-case", "dga", "--legit", "30", "--malicious", "30",
        "--seed", "6", "--split", "test", "--out", str(test_csv),
    ]) == 0
    model = root / "model.ckpt"
    assert cli.main([
        "train", "--train", str(train_csv), "--preset", "cnn", "--gamma", "0",
        "--epochs", "3", "--lr", "0.01", "--seed", "1", "--max-len", "30",
        "--out", str(model),
    ]) == 0
    return root, train_csv, test_csv, model


class TestGenData:
    def test_identical_flags_identical_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        flags = ["gen-data", "--use-case", "url", "--legit", "20", "--malicious",
                 "20", "--seed", "3", "--out"]
        assert cli.main(flags + [str(a)]) == 0
        assert cli.main(flags + [str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_stays_clean(self, capsys, tmp_path):
        code, out, err = run_cli(
            capsys, "gen-data", "--use-case", "dga", "--legit", "5",
            "--malicious", "5", "--seed", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 0 and out == "" and "wrote" in err


class TestWeights:
    def test_manifest_gamma_one(self, capsys):
        code, out, _ = run_cli(capsys, "weights", "--manifest", "dga:train", "--gamma", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["counts"] == [38276, 53052]
        assert payload["raw"] == [1 / 38276, 1 / 53052]

    def test_counts_flag(self, capsys):
        code, out, _ = run_cli(capsys, "weights", "--counts", "9,1", "--gamma", "1")
        payload = json.loads(out)
        assert payload["normalized"] == pytest.approx([5 / 9, 5.0])

    def test_csv_input(self, capsys, toy_corpus):
        _, train_csv, _, _ = toy_corpus
        code, out, _ = run_cli(capsys, "weights", "--train", str(train_csv), "--gamma", "0.5")
        assert code == 0
        assert json.loads(out)["counts"] == [60, 60]

    def test_bad_manifest_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "weights", "--manifest", "dns:train", "--gamma", "1")
        assert code == 2 and "error" in err


class TestTrainEvaluatePredict:
    def test_evaluate_emits_parseable_metrics(self, capsys, toy_corpus):
        _, _, test_csv, model = toy_corpus
        code, out, _ = run_cli(capsys, "evaluate", "--model", str(model), "--test", str(test_csv))
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"accuracy", "precision", "recall", "f1", "tn", "fp", "fn", "tp"}

    def test_predict_schema(self, capsys, toy_corpus):
        _, _, _, model = toy_corpus
        code, out, _ = run_cli(capsys, "predict", "--model", str(model), "--text", "example.com")
        payload = json.loads(out)
        assert code == 0 and set(payload) == {"probability", "label"}
        assert payload["label"] in (0, 1)

    def test_loss_lines_on_stderr(self, capsys, toy_corpus):
        root, train_csv, _, _ = toy_corpus
        code, out, err = run_cli(
            capsys, "train", "--train", str(train_csv), "--preset", "lstm",
            "--epochs", "2", "--max-len", "20", "--out", str(root / "l.ckpt"),
        )
        assert code == 0 and out == ""
        lines = [l for l in err.splitlines() if l.startswith("epoch ")]
        assert len(lines) == 2

    def test_label_flip_transposes_confusion(self, capsys, toy_corpus, tmp_path):
        root, _, test_csv, model = toy_corpus
        flipped = tmp_path / "flipped.csv"
        rows = test_csv.read_text().splitlines()
        out_rows = [rows[0]]
        for row in rows[1:]:
            body, label = row.rsplit(",", 1)
            out_rows.append(f"{body},{1 - int(label)}")
        flipped.write_text("\n".join(out_rows) + "\n")
        _, out_a, _ = run_cli(capsys, "evaluate", "--model", str(model), "--test", str(test_csv))
        _, out_b, _ = run_cli(capsys, "evaluate", "--model", str(model), "--test", str(flipped))
        a, b = json.loads(out_a), json.loads(out_b)
        assert (a["tp"], a["fn"], a["tn"], a["fp"]) == (b["fp"], b["tn"], b["fn"], b["tp"])
        recomputed = scores(ConfusionMatrix(tn=b["tn"], fp=b["fp"], fn=b["fn"], tp=b["tp"]))
        assert recomputed["recall"] == pytest.approx(b["recall"])

    def test_config_file_precedence(self, capsys, toy_corpus, tmp_path):
        root, train_csv, _, _ = toy_corpus
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 1, "max_len": 20, "preset": "cnn"}))
        out_path = tmp_path / "cfg.ckpt"
        code, _, err = run_cli(
            capsys, "train", "--train", str(train_csv), "--config", str(cfg),
            "--epochs", "2", "--out", str(out_path),
        )
        assert code == 0
        assert len([l for l in err.splitlines() if l.startswith("epoch ")]) == 2  # flag wins

    def test_config_file_unknown_key(self, capsys, toy_corpus, tmp_path):
        _, train_csv, _, _ = toy_corpus
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"learning": 1}))
        code, _, _ = run_cli(
            capsys, "train", "--train", str(train_csv), "--config", str(cfg),
            "--out", str(tmp_path / "x.ckpt"),
        )
        assert code == 2

    def test_naive_bayes_preset(self, capsys, toy_corpus, tmp_path):
        _, train_csv, test_csv, _ = toy_corpus
        nb_path = tmp_path / "nb.ckpt"
        code, _, _ = run_cli(
            capsys, "train", "--train", str(train_csv), "--preset", "naive_bayes",
            "--out", str(nb_path),
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "evaluate", "--model", str(nb_path), "--test", str(test_csv))
        assert code == 0 and json.loads(out)["accuracy"] > 80


class TestErrorsAndHelp:
    def test_unknown_flag_is_usage_error(self, capsys):
        assert cli.main(["weights", "--gamma", "1", "--bogus"]) == 2

    def test_unknown_command_is_usage_error(self, capsys):
        assert cli.main(["frobnicate"]) == 2

    def test_missing_file_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "evaluate", "--model", str(tmp_path / "no.ckpt"),
            "--test", str(tmp_path / "no.csv"),
        )
        assert code == 1

    def test_bad_gamma_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "weights", "--counts", "5,5", "--gamma", "7")
        assert code == 2

    def test_every_flag_documented_in_help(self, capsys):
        parser = cli.build_parser()
        sub_actions = [a for a in parser._actions if isinstance(a, type(parser._subparsers._group_actions[0]))]
        for name, sub in sub_actions[0].choices.items():
            text = sub.format_help()
            for action in sub._actions:
                for opt in action.option_strings:
                    assert opt in text, f"{name}: {opt} missing from --help"

    def test_gradcheck_single_preset(self, capsys):
        code, out, _ = run_cli(capsys, "gradcheck", "--preset", "cnn")
        assert code == 0
        payload = json.loads(out)
        assert payload["preset_cnn"] < 1e-4
