"""Regenerates the committed test fixtures. Deterministic.

    python3 tests/fixtures/make_fixtures.py

Needs numpy, Pillow and onnx.
"""
import json
import pathlib

import numpy as np
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent
W, H = 96, 72


def identity(kind: str) -> np.ndarray:
    """Low-frequency synthetic 'face' so the 8x8 toy embedder separates identities."""
    yy, xx = np.mgrid[0:H, 0:W].astype(np.float64)
    if kind == "A":
        img = 40 + 160 * xx / (W - 1)
        img[(xx - 30) ** 2 + (yy - 30) ** 2 < 14 ** 2] = 240
        img[(yy > 44) & (yy < 60) & (xx > 52) & (xx < 80)] = 15
    else:
        img = 200 - 160 * yy / (H - 1)
        img[(xx - 66) ** 2 + (yy - 44) ** 2 < 16 ** 2] = 20
        img[(yy > 8) & (yy < 22) & (xx > 10) & (xx < 34)] = 250
    return img


def jitter(base: np.ndarray, rng: np.random.Generator, shift: int, noise: float) -> np.ndarray:
    dx, dy = rng.integers(-shift, shift + 1, size=2)
    img = np.roll(base, (int(dy), int(dx)), axis=(0, 1))
    img = img + rng.uniform(-6, 6) + rng.normal(0, noise, img.shape)
    gray = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    # Slight per-channel tint so frames are genuinely RGB.
    return np.stack([gray, np.clip(gray.astype(int) + 3, 0, 255).astype(np.uint8), gray], axis=-1)


def write_video(folder: pathlib.Path, frames):
    folder.mkdir(parents=True, exist_ok=True)
    for old in folder.glob("*.png"):
        old.unlink()
    for i, f in enumerate(frames):
        Image.fromarray(f, "RGB").save(folder / f"{i:04d}.png", optimize=True)


def toy_videos():
    rng = np.random.default_rng(20250407)
    base = {"A": identity("A"), "B": identity("B")}
    n = 16
    toy = ROOT / "toy"
    write_video(toy / "real" / "real_a", [jitter(base["A"], rng, 1, 2.0) for _ in range(n)])
    write_video(toy / "real" / "real_b", [jitter(base["B"], rng, 1, 2.0) for _ in range(n)])
    write_video(toy / "stable" / "stable_a", [jitter(base["A"], rng, 3, 6.0) for _ in range(n)])
    write_video(toy / "stable" / "stable_b", [jitter(base["B"], rng, 3, 6.0) for _ in range(n)])
    write_video(toy / "switch" / "switch_ab",
                [jitter(base["A" if (i // 4) % 2 == 0 else "B"], rng, 1, 2.0) for i in range(n)])
    write_video(toy / "switch" / "switch_ba",
                [jitter(base["B" if (i // 4) % 2 == 0 else "A"], rng, 1, 2.0) for i in range(n)])
    write_video(toy / "single" / "lonely", [jitter(base["A"], rng, 1, 2.0)])


def onnx_embedder():
    import onnx
    from onnx import TensorProto, helper, numpy_helper

    rng = np.random.default_rng(7)
    side, dim = 16, 8
    weights = rng.normal(0, 0.05, (3 * side * side, dim)).astype(np.float32)
    bias = rng.normal(0, 0.1, (dim,)).astype(np.float32)

    def model(layout: str) -> bytes:
        shape = [1, 3, side, side] if layout == "nchw" else [1, side, side, 3]
        graph = helper.make_graph(
            [
                helper.make_node("Flatten", ["input"], ["flat"], axis=1),
                helper.make_node("MatMul", ["flat", "W"], ["proj"]),
                helper.make_node("Add", ["proj", "b"], ["embedding"]),
            ],
            f"tiny_{layout}",
            [helper.make_tensor_value_info("input", TensorProto.FLOAT, shape)],
            [helper.make_tensor_value_info("embedding", TensorProto.FLOAT, [1, dim])],
            [numpy_helper.from_array(weights, "W"), numpy_helper.from_array(bias, "b")],
        )
        m = helper.make_model(graph, opset_imports=[helper.make_opsetid("", 11)])
        m.ir_version = 6
        onnx.checker.check_model(m)
        return m.SerializeToString()

    out = ROOT / "onnx"
    out.mkdir(exist_ok=True)
    (out / "tiny_nchw.onnx").write_bytes(model("nchw"))
    (out / "tiny_nhwc.onnx").write_bytes(model("nhwc"))

    pre = {"scale": 1 / 255, "mean": [0.5, 0.4, 0.3], "std": [0.25, 0.5, 0.2],
           "channel_order": "bgr"}
    registry = {
        "format": "fcb-model-registry",
        "version": 1,
        "alignment_template": {
            "size": [112, 112],
            "points": [[38.2946, 51.6963], [73.5318, 51.5014], [56.0252, 71.7366],
                       [41.5493, 92.3655], [70.7299, 92.2041]],
        },
        "models": [
            {"id": "toy", "backend": "toy", "input_size": [64, 64], "embedding_dim": 64},
            {"id": "tiny", "backend": "onnx", "input_size": [side, side], "embedding_dim": dim,
             "weights": "tiny_nchw.onnx", "preprocessing": dict(pre, layout="nchw")},
            {"id": "tiny_nhwc", "backend": "onnx", "input_size": [side, side],
             "embedding_dim": dim, "weights": "tiny_nhwc.onnx",
             "preprocessing": dict(pre, layout="nhwc")},
        ],
    }
    (out / "registry.json").write_text(json.dumps(registry, indent=2) + "\n")

    # Parity fixtures: golden vectors computed here with numpy, independent of
    # the C++ preprocessing and cv::dnn inference path.
    img_rng = np.random.default_rng(11)
    mean = np.array(pre["mean"]) ; std = np.array(pre["std"])
    for k in range(3):
        img = img_rng.integers(0, 256, (side, side, 3), dtype=np.uint8)
        name = f"face{k}.png"
        Image.fromarray(img, "RGB").save(out / name)
        for model_id, layout in (("tiny", "nchw"), ("tiny_nhwc", "nhwc")):
            x = img[..., ::-1].astype(np.float64) * pre["scale"]
            x = (x - mean) / std
            if layout == "nchw":
                x = x.transpose(2, 0, 1)
            golden = x.reshape(-1) @ weights.astype(np.float64) + bias
            fixture = {
                "format": "fcb-parity-fixture",
                "version": 1,
                "image": name,
                "model_id": model_id,
                "golden": [float(v) for v in golden],
                "preprocessing": dict(pre, layout=layout),
                "reference_versions": {"numpy": np.__version__},
            }
            (out / f"parity_{model_id}_{k}.json").write_text(json.dumps(fixture, indent=2) + "\n")


if __name__ == "__main__":
    toy_videos()
    onnx_embedder()
