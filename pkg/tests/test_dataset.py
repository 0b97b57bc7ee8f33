import numpy as np
import pytest

from ote.dataset import (
    Dataset,
    load_csv,
    random_split,
    read_index_file,
    write_csv,
    write_index_file,
)


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestDatasetInvariants:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN"):
            Dataset(np.array([[1.0, np.nan]]), np.array([1]), ("a", "b"))

    def test_rejects_bad_labels(self):
        with pytest.raises(ValueError, match="0 or 1"):
            Dataset(np.ones((2, 1)), np.array([0, 2]), ("a",))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(np.ones((3, 2)), np.array([0, 1]), ("a", "b"))
        with pytest.raises(ValueError):
            Dataset(np.ones((2, 2)), np.array([0, 1]), ("a",))

    def test_immutable(self, toy_data):
        with pytest.raises(ValueError):
            toy_data.features[0, 0] = 5.0

    def test_subset(self, toy_data):
        sub = toy_data.subset(np.array([3, 1, 4]))
        assert sub.n == 3
        assert np.array_equal(sub.features[0], toy_data.features[3])
        assert sub.labels[1] == toy_data.labels[1]


class TestLoadCsv:
    def test_numeric_with_label_mapping(self, tmp_path):
        path = _write(tmp_path, "u,v,cls\n1,2.5,a\n2,3.5,b\n3,4.5,a\n4,5.5,b\n")
        data = load_csv(path, label_column="cls", positive_label="b")
        assert data.n == 4 and data.d == 2
        assert data.labels.tolist() == [0, 1, 0, 1]
        assert data.feature_names == ("u", "v")
        assert data.features[1].tolist() == [2.0, 3.5]

    def test_one_hot_nominal(self, tmp_path):
        path = _write(tmp_path, "color,z,cls\nred,1,a\nblue,2,b\ngreen,3,a\nred,4,b\n")
        data = load_csv(path, label_column="cls", positive_label="a")
        assert data.d == 4  # 3 one-hot columns + z
        assert data.feature_names == ("color=blue", "color=green", "color=red", "z")
        onehot = data.features[:, :3]
        assert np.array_equal(onehot.sum(axis=1), np.ones(4))
        assert onehot[0].tolist() == [0.0, 0.0, 1.0]

    @pytest.mark.parametrize("cell", ["", "NA", "?"])
    def test_missing_value_rejected(self, tmp_path, cell):
        path = _write(tmp_path, f"u,cls\n1,a\n{cell},b\n")
        with pytest.raises(ValueError, match="missing value"):
            load_csv(path, label_column="cls", positive_label="a")

    def test_three_label_classes_rejected(self, tmp_path):
        path = _write(tmp_path, "u,cls\n1,a\n2,b\n3,c\n")
        with pytest.raises(ValueError, match="distinct"):
            load_csv(path, label_column="cls", positive_label="a")

    def test_unknown_positive_label(self, tmp_path):
        path = _write(tmp_path, "u,cls\n1,a\n2,b\n")
        with pytest.raises(ValueError, match="positive label"):
            load_csv(path, label_column="cls", positive_label="z")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv", label_column="y", positive_label="1")

    def test_mixed_column_rejected(self, tmp_path):
        path = _write(tmp_path, "u,cls\n1,a\nx,b\n3,a\n4,b\n")
        with pytest.raises(ValueError, match="mixes numeric"):
            load_csv(path, label_column="cls", positive_label="a")

    def test_missing_label_column(self, tmp_path):
        path = _write(tmp_path, "u,v\n1,2\n")
        with pytest.raises(ValueError, match="label column"):
            load_csv(path, label_column="cls", positive_label="a")

    def test_quoted_fields(self, tmp_path):
        path = _write(tmp_path, 'u,"name",cls\n1,"a,x",p\n2,"b self",q\n')
        data = load_csv(path, label_column="cls", positive_label="p")
        assert data.feature_names == ("u", "name=a,x", "name=b self")

    def test_roundtrip_with_write_csv(self, tmp_path, toy_data):
        path = tmp_path / "round.csv"
        write_csv(toy_data, path)
        back = load_csv(path, label_column="y", positive_label="1")
        assert np.array_equal(back.features, toy_data.features)
        assert np.array_equal(back.labels, toy_data.labels)
        assert back.feature_names == toy_data.feature_names


class TestRandomSplit:
    def test_sizes(self, toy_data):
        pair = random_split(toy_data, 0.7, seed=1)
        assert pair.train_indices.size == round(0.7 * toy_data.n)
        assert pair.test_indices.size == toy_data.n - pair.train_indices.size

    def test_ten_seventy(self):
        data = Dataset(np.arange(10, dtype=float).reshape(10, 1), [0, 1] * 5, ("a",))
        pair = random_split(data, 0.7, seed=5)
        assert pair.train_indices.size == 7
        assert pair.test_indices.size == 3

    def test_exact_partition(self, toy_data):
        for seed in range(10):
            pair = random_split(toy_data, 0.61, seed=seed)
            both = np.sort(np.concatenate([pair.train_indices, pair.test_indices]))
            assert np.array_equal(both, np.arange(toy_data.n))

    def test_determinism(self, toy_data):
        a = random_split(toy_data, 0.5, seed=77)
        b = random_split(toy_data, 0.5, seed=77)
        assert np.array_equal(a.train_indices, b.train_indices)
        assert np.array_equal(a.test_indices, b.test_indices)

    def test_too_small(self):
        data = Dataset(np.arange(10, dtype=float).reshape(10, 1), [0, 1] * 5, ("a",))
        with pytest.raises(ValueError, match="too small"):
            random_split(data, 0.05, seed=0)

    def test_fraction_out_of_range(self, toy_data):
        for frac in (0.0, 1.0, -0.2, 1.4):
            with pytest.raises(ValueError):
                random_split(toy_data, frac, seed=0)


class TestIndexFiles:
    def test_roundtrip(self, tmp_path):
        idx = np.array([4, 0, 17, 3])
        path = tmp_path / "rows.txt"
        write_index_file(idx, path)
        assert path.read_text() == "4\n0\n17\n3\n"
        assert np.array_equal(read_index_file(path), idx)
