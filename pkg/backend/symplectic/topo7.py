"""
Integer arithmetic on Eschenburg quartets and Witten-Kreck-Stolz pairs.
"""

import csv
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .config import DATA_DIR
from .errors import InputError, NonCoprimeError

logger = logging.getLogger(__name__)

TABLE_FILE = "eschenburg_table.csv"
HOMEOMORPHISM_MODULUS = 32
DIFFEOMORPHISM_MODULUS = 28 * 32

Bounds = Sequence[Tuple[int, int]]


@dataclass(frozen=True)
class EschenburgQuartet:
    k: int
    l: int
    p: int
    q: int

    @property
    def weights(self) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
        """Exponents of the circle acting on the left and on the right of SU(3)"""
        return (self.k, self.l, -self.k - self.l), (self.p, self.q, -self.p - self.q)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.k, self.l, self.p, self.q


@dataclass(frozen=True)
class WKSPair:
    k: int
    l: int


@dataclass(frozen=True)
class TableRow:
    quartet: EschenburgQuartet
    s1: str


def admissible(q: EschenburgQuartet) -> bool:
    """Free action of the circle: six gcd conditions, one per matching of the weights"""
    k, l, p, qq = q.as_tuple()
    s = p + qq
    pairs = (
        (k - p, l - qq),
        (k - p, l + s),
        (k + s, l - p),
        (k - qq, l - p),
        (k - qq, l + s),
        (k + s, l - qq),
    )
    return all(gcd(a, b) == 1 for a, b in pairs)


def admissible_as_printed(q: EschenburgQuartet) -> bool:
    """The six conditions with k + p + q in the second and fifth slots"""
    k, l, p, qq = q.as_tuple()
    s = k + p + qq
    pairs = (
        (k - p, l - qq),
        (k - p, s),
        (s, l - p),
        (k - qq, l - p),
        (k - qq, s),
        (s, l - qq),
    )
    return all(gcd(a, b) == 1 for a, b in pairs)


def admissible_naive(q: EschenburgQuartet) -> bool:
    left, right = q.weights
    for perm in itertools.permutations(range(3)):
        if gcd(left[0] - right[perm[0]], left[1] - right[perm[1]]) != 1:
            return False
    return True


def _slice(k: int, bounds: Bounds) -> List[EschenburgQuartet]:
    (_, _), (l0, l1), (p0, p1), (q0, q1) = bounds
    found = []
    for l in range(l0, l1 + 1):
        for p in range(p0, p1 + 1):
            for q in range(q0, q1 + 1):
                quartet = EschenburgQuartet(k, l, p, q)
                if admissible(quartet):
                    found.append(quartet)
    return found


def enumerate_admissible(bounds: Bounds, workers: int = 1) -> Iterator[EschenburgQuartet]:
    """Admissible quartets in an inclusive box, in lexicographic order"""
    if len(bounds) != 4:
        raise InputError("bounds must give (min, max) for each of k, l, p, q")
    bounds = [(int(a), int(b)) for a, b in bounds]
    if any(a > b for a, b in bounds):
        return iter(())
    ks = range(bounds[0][0], bounds[0][1] + 1)
    if workers <= 1:
        slices = (_slice(k, bounds) for k in ks)
        return itertools.chain.from_iterable(slices)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        slices = list(pool.map(lambda k: _slice(k, bounds), ks))
    return itertools.chain.from_iterable(slices)


def count_admissible_naive(bounds: Bounds) -> int:
    ranges = [range(int(a), int(b) + 1) for a, b in bounds]
    return sum(admissible_naive(EschenburgQuartet(*t)) for t in itertools.product(*ranges))


def load_reference_table(path: Optional[str] = None) -> List[TableRow]:
    path = path or os.path.join(DATA_DIR, TABLE_FILE)
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for record in csv.DictReader(f):
            quartet = EschenburgQuartet(*(int(record[c]) for c in ("k", "l", "p", "q")))
            rows.append(TableRow(quartet, record["s1"].strip()))
    return rows


def verify_reference_table(rows: Optional[List[TableRow]] = None) -> Dict:
    rows = rows if rows is not None else load_reference_table()
    report = {
        "success": True,
        "rows": len(rows),
        "admissible": 0,
        "admissible_as_printed": 0,
        "s1_matches": 0,
        "s1_distinct": 0,
        "errors": [],
    }
    for idx, row in enumerate(rows):
        if admissible(row.quartet):
            report["admissible"] += 1
        else:
            report["errors"].append(f"row {idx + 1} {row.quartet.as_tuple()} is not admissible")
        if admissible_as_printed(row.quartet):
            report["admissible_as_printed"] += 1
        expected = round((len(rows) - idx) / len(rows), 6)
        if abs(float(row.s1) - expected) < 5e-7:
            report["s1_matches"] += 1
        else:
            report["errors"].append(f"row {idx + 1}: s1 = {row.s1}, expected {expected:.6f}")
    residues = {round(float(r.s1) % 1.0, 6) for r in rows}
    report["s1_distinct"] = len(residues)
    if len(residues) != len(rows):
        report["errors"].append("two rows share s1 mod 1")
    report["success"] = not report["errors"]
    logger.info(
        "reference table: %d/%d admissible (%d under the printed conditions)",
        report["admissible"], len(rows), report["admissible_as_printed"],
    )
    return report


def wks_free_action(k: int, l: int) -> bool:
    return gcd(k, l) == 1 and k * l != 0


def wks_hypothesis(pair: WKSPair) -> bool:
    k, l = pair.k, pair.l
    return l % 4 == 0 and l % 7 in (0, 3, 4) and l != 0 and gcd(k, l) == 1


def _require_coprime(kp: int, lp: int):
    if gcd(kp, lp) != 1:
        raise NonCoprimeError(f"({kp}, {lp}) is not a coprime pair (gcd {gcd(kp, lp)})")


def wks14_homeomorphic(kp: int, lp: int) -> bool:
    _require_coprime(kp, lp)
    return abs(lp) == 4 and kp % HOMEOMORPHISM_MODULUS == 1


def wks14_diffeomorphic(kp: int, lp: int) -> bool:
    _require_coprime(kp, lp)
    return abs(lp) == 4 and kp % DIFFEOMORPHISM_MODULUS == 1


def smooth_structure_index(kp: int, lp: int) -> int:
    """t in 0..27 with M_{kp,lp} diffeomorphic to M_{32t+1,4}"""
    if not wks14_homeomorphic(kp, lp):
        raise InputError(f"M_({kp},{lp}) is not homeomorphic to M_(1,4)")
    return ((kp - 1) % DIFFEOMORPHISM_MODULUS) // HOMEOMORPHISM_MODULUS


def enumerate_smooth_structures_14() -> List[WKSPair]:
    pairs = [WKSPair(32 * t + 1, 4) for t in range(28)]
    indices = [smooth_structure_index(p.k, p.l) for p in pairs]
    if len(set(indices)) != len(pairs):
        raise InputError("smooth structures repeat")
    if sum(wks14_diffeomorphic(p.k, p.l) for p in pairs) != 1:
        raise InputError("exactly one member should be diffeomorphic to M_(1,4)")
    return pairs


def brute_force_smooth_structures_14(k_max: int = DIFFEOMORPHISM_MODULUS) -> List[WKSPair]:
    """First representative of every diffeomorphism class among k' in [1, k_max], l' = 4"""
    seen: Dict[int, WKSPair] = {}
    for kp in range(1, k_max + 1):
        if gcd(kp, 4) != 1 or not wks14_homeomorphic(kp, 4):
            continue
        seen.setdefault(smooth_structure_index(kp, 4), WKSPair(kp, 4))
    return [seen[t] for t in sorted(seen)]


def classify_wks(pair: WKSPair) -> Dict:
    _require_coprime(pair.k, pair.l)
    result = {
        "k": pair.k,
        "l": pair.l,
        "free_action": wks_free_action(pair.k, pair.l),
        "hypothesis": wks_hypothesis(pair),
        "homeomorphic_to_M14": wks14_homeomorphic(pair.k, pair.l),
        "diffeomorphic_to_M14": wks14_diffeomorphic(pair.k, pair.l),
    }
    if result["homeomorphic_to_M14"]:
        result["smooth_structure"] = smooth_structure_index(pair.k, pair.l)
    return result
