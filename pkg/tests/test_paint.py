import dataclasses
import json

import httpx
import pytest

from mycloth.errors import BackendUnavailableError, NotFoundError, ValidationError
from mycloth.paint import (
    AssetStore,
    GeneratorClientConfig,
    MockPromptRefiner,
    MockTextToImage,
    RemotePromptRefiner,
    RemoteTextToImage,
    generate_paint,
    refine_prompt,
)
from mycloth.paint.clients import MOCK_STYLE_SUFFIX


def test_mock_refine_template():
    out = refine_prompt("dragon", MockPromptRefiner())
    assert out == f"t-shirt print design, dragon, {MOCK_STYLE_SUFFIX}"


def test_refine_empty_prompt_rejected():
    with pytest.raises(ValidationError):
        refine_prompt("   ", MockPromptRefiner())


def test_mock_refine_deterministic():
    r = MockPromptRefiner()
    assert refine_prompt("waves", r) == refine_prompt("waves", r)


def test_mock_generate_shape_and_determinism():
    t2i = MockTextToImage()
    a = generate_paint("X", t2i, (256, 256))
    b = generate_paint("X", t2i, (256, 256))
    assert (a.image.width, a.image.height, a.image.channels) == (256, 256, 4)
    assert a.image.data == b.image.data


def test_mock_generate_prompt_sensitivity():
    t2i = MockTextToImage()
    a = generate_paint("X", t2i, (64, 64))
    b = generate_paint("Y", t2i, (64, 64))
    assert a.image.data != b.image.data


def test_generate_size_bounds():
    t2i = MockTextToImage()
    with pytest.raises(ValidationError):
        generate_paint("X", t2i, (32, 32))
    with pytest.raises(ValidationError):
        generate_paint("X", t2i, (64, 4096))


def test_pipeline_determinism():
    refiner, t2i = MockPromptRefiner(), MockTextToImage()
    outs = [generate_paint(refine_prompt("koi fish", refiner), t2i, (64, 64)) for _ in range(2)]
    assert outs[0].refined_prompt == outs[1].refined_prompt
    assert outs[0].image.data == outs[1].image.data


# -- asset store ------------------------------------------------------------

def test_store_roundtrip(tmp_path):
    store = AssetStore(tmp_path)
    asset = generate_paint("round trip", MockTextToImage(), (64, 64), raw_prompt="rt")
    asset_id = store.store(asset)
    back = store.load(asset_id)
    assert back.raw_prompt == asset.raw_prompt
    assert back.refined_prompt == asset.refined_prompt
    assert back.generator_name == asset.generator_name
    assert back.created_at == asset.created_at
    assert back.image == asset.image


def test_store_unknown_id(tmp_path):
    with pytest.raises(NotFoundError):
        AssetStore(tmp_path).load("missing")


def test_store_twice_distinct_ids_same_bytes(tmp_path):
    store = AssetStore(tmp_path)
    asset = generate_paint("twice", MockTextToImage(), (64, 64))
    id1, id2 = store.store(asset), store.store(asset)
    assert id1 != id2
    assert store.load(id1).image.data == store.load(id2).image.data


# -- config hygiene ---------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValidationError):
        GeneratorClientConfig(timeout_s=0)
    with pytest.raises(ValidationError):
        GeneratorClientConfig(retry_count=9)
    with pytest.raises(ValidationError):
        GeneratorClientConfig(backend="carrier-pigeon")


def test_config_never_serializes_secret(monkeypatch):
    secret = "sk-super-secret-value"
    monkeypatch.setenv("MYCLOTH_BACKEND_TOKEN", secret)
    config = GeneratorClientConfig(backend="remote", chat_endpoint="http://x", t2i_endpoint="http://y")
    dumped = json.dumps(dataclasses.asdict(config)) + repr(config)
    assert secret not in dumped
    assert "MYCLOTH_BACKEND_TOKEN" in dumped


# -- remote clients ---------------------------------------------------------

def failing_transport(counter):
    def handler(request):
        counter.append(request)
        return httpx.Response(500, json={"error": "boom"})

    return httpx.MockTransport(handler)


def test_remote_retry_count_respected():
    calls = []
    config = GeneratorClientConfig(backend="remote", chat_endpoint="http://chat.test/v1",
                                   retry_count=3)
    client = RemotePromptRefiner(config, failing_transport(calls))
    with pytest.raises(BackendUnavailableError):
        client.refine("dragon")
    assert len(calls) == 1 + config.retry_count


def test_remote_chat_parses_first_choice():
    def handler(request):
        body = json.loads(request.content)
        assert body["messages"][1]["content"] == "dragon"
        return httpx.Response(200, json={"choices": [{"message": {"content": " a fierce dragon print "}}]})

    config = GeneratorClientConfig(backend="remote", chat_endpoint="http://chat.test/v1")
    client = RemotePromptRefiner(config, httpx.MockTransport(handler))
    assert client.refine("dragon") == "a fierce dragon print"


def test_remote_t2i_decodes_png_and_adds_alpha():
    import base64

    import numpy as np

    from mycloth.raster import Raster

    rgb = Raster.from_array(np.full((8, 8, 3), 77, dtype=np.uint8))

    def handler(request):
        body = json.loads(request.content)
        assert body["width"] == 8 and body["height"] == 8
        return httpx.Response(200, json={"image": base64.b64encode(rgb.to_png_bytes()).decode()})

    config = GeneratorClientConfig(backend="remote", t2i_endpoint="http://t2i.test/v1")
    client = RemoteTextToImage(config, httpx.MockTransport(handler))
    out = client.generate("p", 8, 8)
    assert out.channels == 4
    assert (out.to_array()[:, :, 3] == 255).all()
