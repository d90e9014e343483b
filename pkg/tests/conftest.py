import numpy as np
import pytest

from draftlab.roster import PlayerHistory
from draftlab.space import SimilaritySpace, _cosine_distance_matrix


def space_from_coords(coords, clusters=None, ids=None) -> SimilaritySpace:
    """Build a SimilaritySpace directly from PC coordinates, bypassing PCA.

    Lets metric tests control the geometry exactly.
    """
    coords = np.asarray(coords, dtype=float)
    n, p = coords.shape
    ids = ids or [f"c{i:03d}" for i in range(n)]
    if clusters is None:
        labels = np.ones(n, dtype=int)
        k = 1
    else:
        labels = np.asarray(clusters, dtype=int)
        k = len(set(labels.tolist()))
    return SimilaritySpace(
        champion_ids=list(ids),
        mean=np.zeros(p),
        std=np.ones(p),
        loadings=np.eye(p),
        coords=coords,
        dist=_cosine_distance_matrix(coords),
        cluster=labels,
        mds_xy=np.zeros((n, 2)),
        explained_variance_ratio=np.ones(p) / p,
        components=p,
        clusters=k,
        seed=0,
    )


def make_history(player_id, picks, tier="Gold", division=3, region="SYN") -> PlayerHistory:
    return PlayerHistory(player_id, region, tier, division, picks)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
