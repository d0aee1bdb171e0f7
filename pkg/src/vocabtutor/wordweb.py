"""Word-web content model: a graph of words, typed relations, and media.

Words link to each other through weighted, kind-tagged relations (synonym,
antonym, hypernym, hyponym, related) and carry references to reviewed media
assets. The graph drives three things: neighbourhood queries, ranked
expansion of a learner's known words into new candidates, and picture
multiple-choice item generation with graph-distance distractors.

Relations are stored directed (hypernym/hyponym need the arrow) but all
traversal is undirected: a link between two words makes each reachable from
the other.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import (
    DanglingMediaReference,
    DuplicateWord,
    InsufficientDistractors,
    InsufficientMedia,
    InvalidWord,
    UnknownItem,
    UnknownWord,
    WordWebFormatError,
)

__all__ = [
    "Tier",
    "RelationKind",
    "MediaKind",
    "MediaAsset",
    "WordNode",
    "Relation",
    "AssessmentItem",
    "WordWeb",
    "parse_wordweb",
    "load_wordweb",
    "dump_wordweb",
]

# Distractors must sit close enough to be plausible but far enough to be
# wrong: graph distance in [2, 4], never a direct taxonomy neighbour.
DISTRACTOR_MIN_DISTANCE = 2
DISTRACTOR_MAX_DISTANCE = 4


class Tier(str, Enum):
    TIER2 = "tier2"
    TIER3 = "tier3"
    OTHER = "other"


class RelationKind(str, Enum):
    SYNONYM = "synonym"
    ANTONYM = "antonym"
    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"
    RELATED = "related"


# Kinds that make a direct neighbour unusable as a distractor: the linked
# word is (near-)interchangeable with the target, so the image would not be
# unambiguously wrong.
_TAXONOMY_KINDS = frozenset(
    {RelationKind.SYNONYM, RelationKind.HYPERNYM, RelationKind.HYPONYM}
)


class MediaKind(str, Enum):
    IMAGE = "image"
    VIDEO = "video"


@dataclass(frozen=True)
class MediaAsset:
    asset_id: str
    kind: MediaKind
    uri: str
    age_appropriate: bool = False


@dataclass(frozen=True)
class WordNode:
    word_id: str
    lemma: str
    tier: Tier = Tier.OTHER
    image_ids: tuple[str, ...] = ()
    video_ids: tuple[str, ...] = ()
    # Example sentences ride along for future activity types; nothing reads
    # them yet.
    sentences: tuple[str, ...] = ()


@dataclass(frozen=True)
class Relation:
    from_word_id: str
    to_word_id: str
    kind: RelationKind
    weight: float = 1.0


@dataclass
class AssessmentItem:
    """A three-image picture MCQ; unverified items are never served."""

    item_id: str
    target_word_id: str
    correct_image_id: str
    distractor_image_ids: tuple[str, str]
    rng_seed: int
    verified: bool = False


class WordWeb:
    """In-memory word graph. Reads are lock-free; mutations are serialized."""

    def __init__(self):
        self._words: dict[str, WordNode] = {}
        self._media: dict[str, MediaAsset] = {}
        self._relations: dict[tuple[str, str, RelationKind], Relation] = {}
        self._adjacency: dict[str, list[Relation]] = {}
        self._items: dict[str, AssessmentItem] = {}
        self._lock = threading.Lock()

    # --- construction ------------------------------------------------------

    def add_media(self, asset: MediaAsset) -> None:
        if not asset.asset_id:
            raise InvalidWord("media asset id must be non-empty")
        with self._lock:
            if asset.asset_id in self._media:
                raise DuplicateWord(f"media asset {asset.asset_id!r} already present")
            self._media[asset.asset_id] = asset

    def add_word(self, node: WordNode) -> None:
        if not node.word_id:
            raise InvalidWord("word id must be non-empty")
        if not node.lemma or not node.lemma.strip():
            raise InvalidWord(f"word {node.word_id!r} has an empty lemma")
        for aid in node.image_ids:
            asset = self._media.get(aid)
            if asset is None:
                raise DanglingMediaReference(f"word {node.word_id!r} references missing asset {aid!r}")
            if asset.kind is not MediaKind.IMAGE:
                raise InvalidWord(f"word {node.word_id!r} lists non-image asset {aid!r} as an image")
        for aid in node.video_ids:
            asset = self._media.get(aid)
            if asset is None:
                raise DanglingMediaReference(f"word {node.word_id!r} references missing asset {aid!r}")
            if asset.kind is not MediaKind.VIDEO:
                raise InvalidWord(f"word {node.word_id!r} lists non-video asset {aid!r} as a video")
        with self._lock:
            if node.word_id in self._words:
                raise DuplicateWord(f"word {node.word_id!r} already present")
            self._words[node.word_id] = node

    def add_relation(self, rel: Relation) -> None:
        if rel.from_word_id == rel.to_word_id:
            raise InvalidWord(f"self-relation on {rel.from_word_id!r}")
        if not 0.0 < rel.weight <= 1.0:
            raise InvalidWord(f"relation weight must lie in (0, 1], got {rel.weight}")
        for wid in (rel.from_word_id, rel.to_word_id):
            if wid not in self._words:
                raise UnknownWord(f"relation endpoint {wid!r} is not in the web")
        key = (rel.from_word_id, rel.to_word_id, rel.kind)
        with self._lock:
            if key in self._relations:
                raise DuplicateWord(
                    f"relation {rel.from_word_id!r}->{rel.to_word_id!r} ({rel.kind.value}) already present"
                )
            self._relations[key] = rel
            self._adjacency.setdefault(rel.from_word_id, []).append(rel)
            self._adjacency.setdefault(rel.to_word_id, []).append(rel)

    # --- lookups -------------------------------------------------------------

    def __contains__(self, word_id: str) -> bool:
        return word_id in self._words

    def __len__(self) -> int:
        return len(self._words)

    def word(self, word_id: str) -> WordNode:
        node = self._words.get(word_id)
        if node is None:
            raise UnknownWord(f"no word {word_id!r}")
        return node

    def lemma(self, word_id: str) -> str:
        return self.word(word_id).lemma

    def media(self, asset_id: str) -> MediaAsset:
        asset = self._media.get(asset_id)
        if asset is None:
            raise DanglingMediaReference(f"no media asset {asset_id!r}")
        return asset

    def word_ids(self) -> list[str]:
        """All word ids in insertion (curriculum) order."""
        return list(self._words)

    def relations(self) -> list[Relation]:
        return list(self._relations.values())

    def media_assets(self) -> list[MediaAsset]:
        return list(self._media.values())

    def item(self, item_id: str) -> AssessmentItem:
        item = self._items.get(item_id)
        if item is None:
            raise UnknownItem(f"no assessment item {item_id!r}")
        return item

    # --- traversal -----------------------------------------------------------

    def _other_end(self, rel: Relation, word_id: str) -> str:
        return rel.to_word_id if rel.from_word_id == word_id else rel.from_word_id

    def distances_from(self, word_id: str, *, max_depth: int,
                       kinds: frozenset[RelationKind] | set[RelationKind] | None = None,
                       ) -> dict[str, int]:
        """Breadth-first distances (undirected) up to max_depth; start excluded."""
        if word_id not in self._words:
            raise UnknownWord(f"no word {word_id!r}")
        seen = {word_id: 0}
        frontier = [word_id]
        depth = 0
        while frontier and depth < max_depth:
            depth += 1
            nxt: list[str] = []
            for wid in frontier:
                for rel in self._adjacency.get(wid, ()):
                    if kinds is not None and rel.kind not in kinds:
                        continue
                    other = self._other_end(rel, wid)
                    if other not in seen:
                        seen[other] = depth
                        nxt.append(other)
            frontier = nxt
        del seen[word_id]
        return seen

    def neighbors(self, word_id: str, *, kinds=None, max_depth: int = 1,
                  ) -> list[tuple[str, int]]:
        """Reachable words with their minimum depth, sorted by (depth, lemma)."""
        if max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {max_depth}")
        kindset = frozenset(kinds) if kinds is not None else None
        dist = self.distances_from(word_id, max_depth=max_depth, kinds=kindset)
        return sorted(dist.items(), key=lambda kv: (kv[1], self._words[kv[0]].lemma, kv[0]))

    def related_expansion(self, seed_ids, k: int) -> list[str]:
        """Top-k non-seed words ranked by total relation weight into the seeds.

        Only direct edges count; ties break toward the ascending lemma so the
        ranking is reproducible. Returns fewer than k when the pool runs out.
        """
        seeds = list(seed_ids)
        for sid in seeds:
            if sid not in self._words:
                raise UnknownWord(f"no word {sid!r}")
        if k <= 0:
            return []
        seedset = set(seeds)
        pull: dict[str, float] = {}
        for sid in seedset:
            for rel in self._adjacency.get(sid, ()):
                other = self._other_end(rel, sid)
                if other in seedset:
                    continue
                pull[other] = pull.get(other, 0.0) + rel.weight
        ranked = sorted(pull.items(),
                        key=lambda kv: (-kv[1], self._words[kv[0]].lemma, kv[0]))
        return [wid for wid, _ in ranked[:k]]

    # --- assessment items ------------------------------------------------------

    def _eligible_images(self, node: WordNode, *, exclude=frozenset()) -> list[str]:
        return sorted(a for a in node.image_ids
                      if self._media[a].age_appropriate and a not in exclude)

    def generate_picture_mcq(self, target_word_id: str, rng_seed: int) -> AssessmentItem:
        """Build a three-image item: one target image, two far-enough distractors.

        Fully deterministic in (target, rng_seed). The fresh item is always
        unverified; review happens through verify_item before serving.
        """
        node = self.word(target_word_id)
        target_images = self._eligible_images(node)
        if not target_images:
            raise InsufficientMedia(f"{target_word_id!r} has no age-appropriate image")

        taboo = {
            self._other_end(rel, target_word_id)
            for rel in self._adjacency.get(target_word_id, ())
            if rel.kind in _TAXONOMY_KINDS
        }
        dist = self.distances_from(target_word_id, max_depth=DISTRACTOR_MAX_DISTANCE)
        target_owned = set(node.image_ids)
        candidates: list[tuple[str, list[str]]] = []
        for wid in sorted(dist, key=lambda w: (self._words[w].lemma, w)):
            if dist[wid] < DISTRACTOR_MIN_DISTANCE or wid in taboo:
                continue
            images = self._eligible_images(self._words[wid], exclude=target_owned)
            if images:
                candidates.append((wid, images))
        if len(candidates) < 2:
            raise InsufficientDistractors(
                f"{target_word_id!r}: need 2 distractor words at distance "
                f"[{DISTRACTOR_MIN_DISTANCE}, {DISTRACTOR_MAX_DISTANCE}], found {len(candidates)}"
            )

        rng = random.Random(rng_seed)
        correct = rng.choice(target_images)
        first = rng.randrange(len(candidates))
        word1, images1 = candidates[first]
        img1 = rng.choice(images1)
        rest = candidates[:first] + candidates[first + 1:]
        rng.shuffle(rest)
        img2 = None
        for _, images2 in rest:
            pool = [a for a in images2 if a != img1]
            if pool:
                img2 = rng.choice(pool)
                break
        if img2 is None:
            raise InsufficientDistractors(
                f"{target_word_id!r}: no second distractor image distinct from {img1!r}"
            )

        item = AssessmentItem(
            item_id=f"mcq:{target_word_id}:{rng_seed}",
            target_word_id=target_word_id,
            correct_image_id=correct,
            distractor_image_ids=(img1, img2),
            rng_seed=rng_seed,
        )
        with self._lock:
            item = self._items.setdefault(item.item_id, item)
        return item

    def verify_item(self, item_id: str, approved: bool) -> AssessmentItem:
        """Record the human review outcome; only approved items get served."""
        with self._lock:
            item = self._items.get(item_id)
            if item is None:
                raise UnknownItem(f"no assessment item {item_id!r}")
            item.verified = bool(approved)
            return item

    def servable_items(self, target_word_id: str | None = None) -> list[AssessmentItem]:
        """Approved items, optionally filtered to one target word."""
        if target_word_id is not None and target_word_id not in self._words:
            raise UnknownWord(f"no word {target_word_id!r}")
        return [
            item for item in self._items.values()
            if item.verified and (target_word_id is None or item.target_word_id == target_word_id)
        ]


# --- JSON document format ------------------------------------------------------
#
# {
#   "media":     [{"assetId", "kind", "uri", "ageAppropriate"}, ...],
#   "words":     [{"wordId", "lemma", "tier", "imageIds", "videoIds", "sentences"}, ...],
#   "relations": [{"fromWordId", "toWordId", "kind", "weight"}, ...]
# }
#
# The words array order is the curriculum order.

def _require(record: dict, key: str, where: str):
    if key not in record:
        raise WordWebFormatError(f"{where}: missing field {key!r}")
    return record[key]


def _parse_enum(enum_cls, raw, where: str):
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise WordWebFormatError(f"{where}: {raw!r} is not one of [{allowed}]") from None


def parse_wordweb(doc: dict) -> WordWeb:
    """Build a validated WordWeb from a parsed JSON document.

    Every violation is rejected with the offending section and record index
    so bad rows in a large export are findable.
    """
    if not isinstance(doc, dict):
        raise WordWebFormatError("top level must be a JSON object")
    web = WordWeb()
    for i, record in enumerate(doc.get("media", [])):
        where = f"media[{i}]"
        try:
            web.add_media(MediaAsset(
                asset_id=str(_require(record, "assetId", where)),
                kind=_parse_enum(MediaKind, _require(record, "kind", where), where),
                uri=str(record.get("uri", "")),
                age_appropriate=bool(record.get("ageAppropriate", False)),
            ))
        except WordWebFormatError:
            raise
        except Exception as err:
            raise WordWebFormatError(f"{where}: {err}") from err
    for i, record in enumerate(doc.get("words", [])):
        where = f"words[{i}]"
        try:
            web.add_word(WordNode(
                word_id=str(_require(record, "wordId", where)),
                lemma=str(_require(record, "lemma", where)),
                tier=_parse_enum(Tier, record.get("tier", "other"), where),
                image_ids=tuple(record.get("imageIds", [])),
                video_ids=tuple(record.get("videoIds", [])),
                sentences=tuple(record.get("sentences", [])),
            ))
        except WordWebFormatError:
            raise
        except Exception as err:
            raise WordWebFormatError(f"{where}: {err}") from err
    for i, record in enumerate(doc.get("relations", [])):
        where = f"relations[{i}]"
        try:
            weight = record.get("weight", 1.0)
            web.add_relation(Relation(
                from_word_id=str(_require(record, "fromWordId", where)),
                to_word_id=str(_require(record, "toWordId", where)),
                kind=_parse_enum(RelationKind, _require(record, "kind", where), where),
                weight=float(weight),
            ))
        except WordWebFormatError:
            raise
        except Exception as err:
            raise WordWebFormatError(f"{where}: {err}") from err
    return web


def load_wordweb(path: str | Path) -> WordWeb:
    """Parse and validate a word-web JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise WordWebFormatError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from err
    return parse_wordweb(doc)


def dump_wordweb(web: WordWeb) -> dict:
    """Serialize back to the document format (inverse of parse_wordweb)."""
    return {
        "media": [
            {"assetId": a.asset_id, "kind": a.kind.value, "uri": a.uri,
             "ageAppropriate": a.age_appropriate}
            for a in web.media_assets()
        ],
        "words": [
            {"wordId": w.word_id, "lemma": w.lemma, "tier": w.tier.value,
             "imageIds": list(w.image_ids), "videoIds": list(w.video_ids),
             "sentences": list(w.sentences)}
            for w in (web.word(wid) for wid in web.word_ids())
        ],
        "relations": [
            {"fromWordId": r.from_word_id, "toWordId": r.to_word_id,
             "kind": r.kind.value, "weight": r.weight}
            for r in web.relations()
        ],
    }
