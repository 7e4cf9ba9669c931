"""N-way-K-shot episode construction over a generated dataset.

Two samplers: the standard uniform one, and the metadata-based one (per
class, sample a centroid inside the bounding box of the class's metadata
vectors and take the S+Q nearest neighbors). Manifests are JSON-lines with a
header record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from charsynth.datasetio import read_rows
from charsynth.errors import InsufficientExamples, ManifestError, MissingMetadata

DEFAULT_METADATA_COLUMNS = ("z_linear_rotation", "z_linear_shear_x")


@dataclass(frozen=True)
class EpisodeSpec:
    n_way: int
    k_shot: int
    q_query: int
    seed: int = 0

    def __post_init__(self):
        if self.n_way < 2 or self.k_shot < 1 or self.q_query < 1:
            raise ValueError("need n_way >= 2, k_shot >= 1, q_query >= 1")


@dataclass
class EpisodeManifest:
    episode_id: int
    classes: list[str]
    support: list[tuple[str, str]]  # (class, image_name)
    query: list[tuple[str, str]]


@dataclass
class DatasetTable:
    """Per-class image names and metadata vectors, in CSV row order."""

    classes: list[str]
    images: dict[str, list[str]]
    metadata: dict[str, np.ndarray] = field(default_factory=dict)


def load_table(dataset_dir: str, metadata_columns=()) -> DatasetTable:
    rows = read_rows(dataset_dir)
    classes: list[str] = []
    images: dict[str, list[str]] = {}
    vectors: dict[str, list[list[float]]] = {}
    for i, row in enumerate(rows):
        cls = row["text"]
        if cls not in images:
            classes.append(cls)
            images[cls] = []
            vectors[cls] = []
        images[cls].append(row["image_name"])
        if metadata_columns:
            vec = []
            for col in metadata_columns:
                if col not in row or row[col] == "":
                    raise MissingMetadata(f"row {i}: no value for column {col!r}")
                vec.append(float(row[col]))
            vectors[cls].append(vec)
    metadata = {c: np.array(v, dtype=np.float64) for c, v in vectors.items()} if metadata_columns else {}
    return DatasetTable(classes=classes, images=images, metadata=metadata)


def _episode_rng(seed: int, episode_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, episode_id])))


def standard_episode(table: DatasetTable, spec: EpisodeSpec, rng: np.random.Generator) -> EpisodeManifest:
    """Uniform classes, then uniform support/query without replacement."""
    need = spec.k_shot + spec.q_query
    eligible = [c for c in table.classes if len(table.images[c]) >= need]
    if len(eligible) < spec.n_way:
        raise InsufficientExamples(
            f"{len(eligible)} classes have >= {need} examples; need {spec.n_way}"
        )
    chosen = [eligible[i] for i in rng.choice(len(eligible), size=spec.n_way, replace=False)]
    support, query = [], []
    for cls in chosen:
        names = table.images[cls]
        picked = rng.choice(len(names), size=need, replace=False)
        for j, idx in enumerate(picked):
            (support if j < spec.k_shot else query).append((cls, names[idx]))
    return EpisodeManifest(episode_id=0, classes=chosen, support=support, query=query)


def select_nearest(vectors: np.ndarray, centroid: np.ndarray, count: int) -> list[int]:
    """Indices of the `count` nearest vectors; ties by ascending index."""
    d = np.linalg.norm(vectors - centroid[None, :], axis=1)
    order = np.lexsort((np.arange(len(d)), d))
    return [int(i) for i in order[:count]]


def metadata_episode(
    table: DatasetTable, spec: EpisodeSpec, rng: np.random.Generator,
    standardize: bool = False,
) -> EpisodeManifest:
    """Nuisance-homogeneous episodes: per class, S+Q nearest neighbors of a
    centroid sampled uniformly inside the class's metadata bounding box."""
    if not table.metadata:
        raise MissingMetadata("dataset table was loaded without metadata columns")
    need = spec.k_shot + spec.q_query
    eligible = [c for c in table.classes if len(table.images[c]) >= need]
    if len(eligible) < spec.n_way:
        raise InsufficientExamples(
            f"{len(eligible)} classes have >= {need} examples; need {spec.n_way}"
        )
    chosen = [eligible[i] for i in rng.choice(len(eligible), size=spec.n_way, replace=False)]
    support, query = [], []
    for cls in chosen:
        vectors = table.metadata[cls]
        if standardize:
            std = vectors.std(axis=0)
            std[std == 0] = 1.0
            vectors = (vectors - vectors.mean(axis=0)) / std
        lo = vectors.min(axis=0)
        hi = vectors.max(axis=0)
        centroid = np.array([rng.uniform(l, h) if h > l else l for l, h in zip(lo, hi)])
        selected = select_nearest(vectors, centroid, need)
        support_ids = set(
            int(i) for i in rng.choice(len(selected), size=spec.k_shot, replace=False)
        )
        names = table.images[cls]
        for j, idx in enumerate(selected):
            (support if j in support_ids else query).append((cls, names[idx]))
    return EpisodeManifest(episode_id=0, classes=chosen, support=support, query=query)


def build_episodes(
    table: DatasetTable,
    spec: EpisodeSpec,
    count: int,
    mode: str = "standard",
    standardize: bool = False,
) -> list[EpisodeManifest]:
    """Seeded per-episode streams keyed by index: order-independent."""
    episodes = []
    for episode_id in range(count):
        rng = _episode_rng(spec.seed, episode_id)
        if mode == "standard":
            ep = standard_episode(table, spec, rng)
        elif mode == "metadata":
            ep = metadata_episode(table, spec, rng, standardize=standardize)
        else:
            raise ValueError(f"unknown episode mode {mode!r}")
        ep.episode_id = episode_id
        episodes.append(ep)
    return episodes


def write_manifest(
    episodes: list[EpisodeManifest],
    out_file: str,
    spec: EpisodeSpec,
    mode: str = "standard",
    metadata_columns=(),
) -> None:
    """JSON-lines: one header record, then one record per episode."""
    header = {
        "record": "header",
        "n_way": spec.n_way,
        "k_shot": spec.k_shot,
        "q_query": spec.q_query,
        "seed": spec.seed,
        "mode": mode,
        "metadata_columns": list(metadata_columns),
        "distance": "euclidean-unnormalized",
    }
    with open(out_file, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for ep in episodes:
            fh.write(
                json.dumps(
                    {
                        "record": "episode",
                        "episode_id": ep.episode_id,
                        "classes": ep.classes,
                        "support": [[c, n] for c, n in ep.support],
                        "query": [[c, n] for c, n in ep.query],
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_manifest(path: str) -> tuple[dict, list[EpisodeManifest]]:
    episodes = []
    header = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("record") == "header":
                header = obj
            elif obj.get("record") == "episode":
                ep = EpisodeManifest(
                    episode_id=obj["episode_id"],
                    classes=list(obj["classes"]),
                    support=[tuple(x) for x in obj["support"]],
                    query=[tuple(x) for x in obj["query"]],
                )
                if set(ep.support) & set(ep.query):
                    raise ManifestError(f"line {lineno}: support/query overlap")
                episodes.append(ep)
            else:
                raise ManifestError(f"line {lineno}: unknown record type")
    if header is None:
        raise ManifestError("manifest has no header record")
    return header, episodes
