import os.path

import numpy as np
import pandas as pd
import pytest

from colorcount.errors import BadParamsError, DatasetIOError, SettingUnsupportedError
import colorcount.apps.bench as bench
import colorcount.oracle as oracle


def test_generate_dataset():
    """
    Generation is deterministic and respects the grid.
    """

    for setting in oracle.SETTINGS:
        for dist in bench.DISTRIBUTIONS:
            header, objects = bench.generate_dataset(setting, 30, 5, dist=dist, seed=3)
            _, again = bench.generate_dataset(setting, 30, 5, dist=dist, seed=3)

            assert header["setting"] == setting
            assert header["n"] == 30
            assert header["grid"] == 120
            assert len(objects) == 30
            assert objects == again

            for obj in objects:
                assert 0 <= oracle.color_of(obj) < 5

    header, objects = bench.generate_dataset(oracle.ORTHO_RD, 10, 3, dim=4)

    assert header["dim"] == 4
    assert all(obj.dim == 4 for obj in objects)

    with pytest.raises(BadParamsError):
        bench.generate_dataset(oracle.DOM2D, -1, 3)

    with pytest.raises(SettingUnsupportedError):
        bench.generate_dataset("torus", 10, 3)


def test_dataset_io(tmp_path):
    """
    A written dataset reads back unchanged.
    """

    for setting in oracle.SETTINGS:
        filename = os.path.join(str(tmp_path), "{0}.jsonl".format(setting))
        header, objects = bench.generate_dataset(setting, 20, 4, seed=5)

        bench.write_dataset(filename, header, objects)
        header2, objects2 = bench.read_dataset(filename)

        assert header2 == header
        assert objects2 == objects

    # header only
    filename = os.path.join(str(tmp_path), "empty.jsonl")
    header, objects = bench.generate_dataset(oracle.DOM2D, 0, 4)
    bench.write_dataset(filename, header, objects)

    header2, objects2 = bench.read_dataset(filename)

    assert header2["n"] == 0
    assert objects2 == []


def test_dataset_io_errors(tmp_path):
    """
    Missing, empty and malformed files raise a dataset error.
    """

    with pytest.raises(DatasetIOError):
        bench.read_dataset(os.path.join(str(tmp_path), "missing.jsonl"))

    filename = os.path.join(str(tmp_path), "blank.jsonl")

    with open(filename, "w") as fd:
        fd.write("\n")

    with pytest.raises(DatasetIOError):
        bench.read_dataset(filename)

    with open(filename, "w") as fd:
        fd.write('{"setting": "dom2d"}\nnot json\n')

    with pytest.raises(DatasetIOError):
        bench.read_dataset(filename)

    with pytest.raises(DatasetIOError):
        bench.write_dataset(str(tmp_path), {"setting": "dom2d"}, [])


def test_build_structure():
    """
    Structures refuse settings they do not handle.
    """

    _, objects = bench.generate_dataset(oracle.DOM2D, 10, 3)

    with pytest.raises(SettingUnsupportedError):
        bench.build_structure("ortho3s", oracle.DOM2D, objects, 0.5)

    with pytest.raises(SettingUnsupportedError):
        bench.build_structure("unknown", oracle.DOM2D, objects, 0.5)

    structure = bench.build_structure("oracle", oracle.DOM2D, objects, 0.5)

    assert structure.space_units() == 10


def test_verify_structure():
    """
    The oracle passes the verification and a corrupted oracle fails it.
    """

    _, objects = bench.generate_dataset(oracle.STAB5S_3D, 25, 4, seed=2)
    universe = oracle.enumerate_queries(oracle.STAB5S_3D, objects, max_queries=500)
    structure = bench.build_structure("oracle", oracle.STAB5S_3D, objects, 0.5)

    report = bench.verify_structure(structure, oracle.STAB5S_3D, objects, universe, 0.5)

    assert report["queries"] == len(universe)
    assert report["contract_violations"] == 0
    assert report["small_k_violations"] == 0
    assert report["max_ratio_err"] == 0.0

    report = bench.verify_structure(
        structure, oracle.STAB5S_3D, objects, universe, 0.5, corrupt=True
    )

    assert report["contract_violations"] == len(universe)


def test_main_gen_verify(tmp_path, capsys):
    """
    Generate a dataset on the commandline and verify structures on it.
    """

    filename = os.path.join(str(tmp_path), "dom2d.jsonl")

    bench.main(
        ["gen", "--setting", "dom2d", "--n", "40", "--colors", "10", "--out", filename]
    )

    assert os.path.isfile(filename)

    for structure in ["oracle", "stab2d"]:
        bench.main(["verify", filename, "--structure", structure, "--eps", "1.0"])

        captured = capsys.readouterr()

        assert "contract: pass" in captured.out
        assert "exact_small_k: pass" in captured.out
        assert "universe: complete" in captured.out

    bench.main(
        ["verify", filename, "--structure", "stab2d", "--eps", "1.0", "--max-queries", "50"]
    )

    captured = capsys.readouterr()

    assert "contract: pass" in captured.out
    assert "universe: incomplete" in captured.out

    with pytest.raises(SystemExit) as excinfo:
        bench.main(["verify", filename, "--structure", "oracle", "--corrupt"])

    assert excinfo.value.code == 1
    assert "contract: FAIL" in capsys.readouterr().out

    with pytest.raises(SystemExit) as excinfo:
        bench.main(["verify", filename, "--structure", "ortho4s"])

    assert excinfo.value.code == 1
    assert "SETTING_UNSUPPORTED" in capsys.readouterr().out


def test_main_bench(tmp_path, capsys):
    """
    The benchmark writes one CSV row per dataset and repetition.
    """

    filenames = []

    for n in [20, 40]:
        filename = os.path.join(str(tmp_path), "range3s_{0}.jsonl".format(n))
        bench.main(["gen", "--setting", "range3s_2d", "--n", str(n), "--out", filename])
        filenames.append(filename)

    out = os.path.join(str(tmp_path), "bench.csv")

    bench.main(
        ["bench"]
        + filenames
        + ["--structure", "initial2", "--repetitions", "2", "--max-queries", "2000"]
        + ["--out", out]
    )

    df = pd.read_csv(out)

    assert list(df.columns) == bench.CSV_COLUMNS
    assert len(df.index) == 4
    assert np.all(df["structure"] == "initial2")
    assert np.all(df["space_units"] > 0)

    capsys.readouterr()

    bench.main(["bench", filenames[0], "--structure", "oracle", "--max-queries", "500"])

    lines = capsys.readouterr().out.splitlines()

    assert lines[0] == ",".join(bench.CSV_COLUMNS)
    assert len(lines) == 2


def test_check_args(tmp_path):
    """
    Bad arguments exit before any work is done.
    """

    missing = os.path.join(str(tmp_path), "missing.jsonl")

    for argv in [
        ["verify", missing, "--structure", "oracle"],
        ["gen", "--setting", "dom2d", "--n", "-1", "--out", missing],
        ["gen", "--setting", "dom2d", "--colors", "0", "--out", missing],
        ["gen", "--setting", "ortho_rd", "--dim", "5", "--out", missing],
        ["bench", missing, "--structure", "oracle", "--max-queries", "0"],
    ]:
        with pytest.raises(SystemExit) as excinfo:
            bench.main(argv)

        assert excinfo.value.code == 1

    assert not os.path.isfile(missing)

    for command in ["verify", "bench"]:
        args = bench.parse_args([command, missing, "--structure", "oracle"])
        assert args.max_queries is None


def test_fit_space():
    """
    The fit recovers the exponent of a power law.
    """

    df = pd.DataFrame(
        {"n": [10, 100, 1000, 1000], "space_units": [100.0, 1.0e4, 1.0e6, 1.0e6]}
    )

    fitresult = bench.fit_space(df)

    assert fitresult.best_values["slope"] == pytest.approx(2.0, abs=1.0e-3)

    with pytest.raises(BadParamsError):
        bench.fit_space(df[df["n"] == 10])


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
