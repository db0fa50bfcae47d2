import numpy as np
import pytest

from droidtriage.catalog import FeatureCatalog, FeatureDef, default_catalog
from droidtriage.extract import scan_app


def _write_tree(root, manifest=None, files=()):
    root.mkdir(parents=True, exist_ok=True)
    if manifest is not None:
        (root / "AndroidManifest.xml").write_text(manifest)
    for rel, content in files:
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content)


def test_permission_token_match(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        manifest='<uses-permission android:name="android.permission.SEND_SMS"/>',
    )
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("SEND_SMS")] == 1
    assert bits.sum() == 1


def test_permission_requires_token_boundary(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        manifest='<x name="android.permission.SEND_SMS_EXTRA"/> <y name="xandroid.permission.READ_SMS"/>',
    )
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("SEND_SMS")] == 0
    assert bits[cat.index_of("READ_SMS")] == 0


def test_empty_tree_gives_zero_vector(tmp_path):
    cat = default_catalog()
    _write_tree(tmp_path / "app", manifest="")
    assert not scan_app(tmp_path / "app", cat).any()


def test_attribute_pattern_in_code_file(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        manifest="",
        files=[("smali/a/b.smali", "invoke-static {}, createSubprocess(II)")],
    )
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("createSubprocess")] == 1


def test_subfolders_are_inspected(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        manifest="",
        files=[("assets/deep/nest/run.sh", "#!/system/bin/sh\nchmod 777 /data\n")],
    )
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("/system/bin/sh")] == 1
    assert bits[cat.index_of("chmod")] == 1


def test_binary_files_scanned_bytewise(tmp_path):
    cat = default_catalog()
    payload = b"\x00\x01\xff" + b"pm install" + b"\xfe\x00"
    _write_tree(tmp_path / "app", manifest="", files=[("lib/native.so", payload)])
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("pm install")] == 1


def test_manifest_not_scanned_for_attributes(tmp_path):
    cat = default_catalog()
    _write_tree(tmp_path / "app", manifest="chmod createSubprocess")
    bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("chmod")] == 0
    assert bits[cat.index_of("createSubprocess")] == 0


def test_missing_manifest_warns_and_zeroes_permissions(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        files=[("code.txt", "android.permission.SEND_SMS and busybox")],
    )
    with pytest.warns(UserWarning, match="missing"):
        bits = scan_app(tmp_path / "app", cat)
    assert bits[cat.index_of("SEND_SMS")] == 0  # permissions come from the manifest only
    assert bits[cat.index_of("busybox")] == 1


def test_unreadable_root(tmp_path):
    with pytest.raises(NotADirectoryError):
        scan_app(tmp_path / "nope", default_catalog())


def test_monotone_under_added_files(tmp_path):
    cat = default_catalog()
    _write_tree(
        tmp_path / "app",
        manifest='"android.permission.INTERNET"',
        files=[("a.txt", "getDeviceId")],
    )
    before = scan_app(tmp_path / "app", cat)
    (tmp_path / "app" / "b.txt").write_text("DexClassLoader busybox")
    after = scan_app(tmp_path / "app", cat)
    assert np.all(after >= before)
    assert after.sum() > before.sum()


def test_traversal_order_independent(tmp_path):
    cat = default_catalog()
    contents = ["chmod", "busybox", "TelephonyManager", "nothing here"]
    _write_tree(
        tmp_path / "one",
        manifest="",
        files=[(f"z{i}.txt", c) for i, c in enumerate(contents)],
    )
    _write_tree(
        tmp_path / "two",
        manifest="",
        files=[(f"a{9 - i}/deep.txt", c) for i, c in enumerate(contents)],
    )
    assert np.array_equal(scan_app(tmp_path / "one", cat), scan_app(tmp_path / "two", cat))


def test_inverse_construction_reproduces_vector(tmp_path, rng):
    perms = [FeatureDef(f"P{i}", "PERMISSION", f"android.permission.P{i}") for i in range(6)]
    attrs = [FeatureDef(f"A{i}", "API", f"uniquetoken{i}x") for i in range(6)]
    cat = FeatureCatalog(perms + attrs)
    target = (rng.random(12) < 0.5).astype(np.uint8)
    manifest = " ".join(f'"{perms[i].pattern}"' for i in range(6) if target[i])
    files = [
        (f"src/file{i}.txt", f"call {attrs[i].pattern} here")
        for i in range(6)
        if target[6 + i]
    ]
    _write_tree(tmp_path / "app", manifest=manifest, files=files)
    assert np.array_equal(scan_app(tmp_path / "app", cat), target)
