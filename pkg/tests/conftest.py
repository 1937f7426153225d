import numpy as np
import pytest

from copra_lab.network import AdapterSet, BaseNet, LoraAdapter
from copra_lab.rng import RngStream


def make_base(dims, seed=0):
    rng = RngStream(seed, 99)
    weights = [
        rng.normal((dims[l + 1], dims[l])) / np.sqrt(dims[l])
        for l in range(len(dims) - 1)
    ]
    return BaseNet(dims=list(dims), weights=weights)


def make_adapters(base, rank=2, lora_scale=1.0, seed=0, random_b=True):
    rng = RngStream(seed, 98)
    ads = []
    for w in base.weights:
        m, n = w.shape
        a = rng.normal((rank, n))
        b = rng.normal((m, rank)) if random_b else np.zeros((m, rank))
        ads.append(LoraAdapter(A=a, B=b, rank=rank, lora_scale=lora_scale))
    return AdapterSet(adapters=ads, seed=seed)


@pytest.fixture
def tiny_base():
    return make_base([2, 8, 8, 4], seed=0)


@pytest.fixture
def tiny_inputs():
    rng = RngStream(5, 97)
    x = rng.normal((6, 2))
    y = rng.next_u64(6) % np.uint64(4)
    return x, y.astype(np.int64)
