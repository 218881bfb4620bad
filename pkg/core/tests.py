import numpy as np

from .conf import default_threads, dense_guard
from .seeding import SEED_MASK, STREAM_BACKEND, STREAM_GRAPH, derive_seed, make_rng


class TestSeeding:
    def test_derive_seed_is_stable(self):
        assert derive_seed(7, 1, 300, 0) == derive_seed(7, 1, 300, 0)

    def test_keys_change_the_seed(self):
        seeds = {derive_seed(7, 1, 300, rep) for rep in range(100)}
        assert len(seeds) == 100
        assert derive_seed(7, STREAM_BACKEND) != derive_seed(7, STREAM_GRAPH)
        assert derive_seed(1, 2) != derive_seed(2, 1)

    def test_fits_in_signed_bigint(self):
        assert all(0 <= derive_seed(seed, 3) <= SEED_MASK for seed in range(50))

    def test_make_rng_streams(self):
        first = make_rng(5, STREAM_GRAPH).random(4)
        assert np.array_equal(first, make_rng(5, STREAM_GRAPH).random(4))
        assert not np.array_equal(first, make_rng(5, STREAM_BACKEND).random(4))


class TestConf:
    def test_values_come_from_settings(self, settings):
        settings.RANDCLUST_DENSE_GUARD = 123
        settings.RANDCLUST_THREADS = 0
        assert dense_guard() == 123
        assert default_threads() == 1

    def test_defaults_when_missing(self, settings):
        del settings.RANDCLUST_DENSE_GUARD
        assert dense_guard() == 20000
