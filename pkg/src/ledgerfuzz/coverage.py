"""Hit-counter coverage map with bucketed new-coverage detection.

The map is 65,536 saturating 8-bit counters indexed by site id. For the
"did this input reach anything new" decision, raw counts collapse into 9
classes: 0 (unhit) plus the 8 hit buckets 1, 2, 3, 4-7, 8-15, 16-31,
32-127 and 128-255. An execution is new coverage when some site lands in
a strictly higher bucket than the global map has ever seen there.
"""

from __future__ import annotations

import hashlib

MAP_SIZE = 65536

# Lower bounds of the 8 nonzero hit buckets.
_BUCKET_LOWER_BOUNDS = (1, 2, 3, 4, 8, 16, 32, 128)


def _build_bucket_table() -> bytes:
    table = bytearray(256)
    for value in range(256):
        bucket = 0
        for i, lower in enumerate(_BUCKET_LOWER_BOUNDS):
            if value >= lower:
                bucket = i + 1
        table[value] = bucket
    return bytes(table)


BUCKET_TABLE = _build_bucket_table()


class CoverageMap:
    """Fixed array of 65,536 saturating 8-bit hit counters."""

    __slots__ = ("counters", "_touched")

    def __init__(self) -> None:
        self.counters = bytearray(MAP_SIZE)
        self._touched: set[int] = set()

    def record(self, site: int) -> None:
        """Saturating-increment the counter for ``site mod 65536``."""
        site %= MAP_SIZE
        value = self.counters[site]
        if value < 255:
            self.counters[site] = value + 1
        self._touched.add(site)

    def cover_count(self) -> int:
        """Number of distinct sites hit at least once."""
        return MAP_SIZE - self.counters.count(0)

    def reset(self) -> None:
        """Clear all counters; cheap when few sites were touched."""
        for site in self._touched:
            self.counters[site] = 0
        self._touched.clear()

    def signature(self) -> bytes:
        """Digest of the bucketized counter array."""
        bucketized = bytes(self.counters).translate(BUCKET_TABLE)
        return hashlib.sha256(bucketized).digest()


def is_new_coverage(global_map: CoverageMap, run_map: CoverageMap) -> bool:
    """True iff the run reaches a strictly higher bucket anywhere.

    When true, the run is merged into the global map (per-site counter
    maximum, which is exactly per-site bucket maximum since bucketization
    is monotone). Merging is idempotent and order-insensitive.
    """
    table = BUCKET_TABLE
    global_counters = global_map.counters
    run_counters = run_map.counters
    new = False
    for site in run_map._touched:
        if table[run_counters[site]] > table[global_counters[site]]:
            new = True
            break
    if new:
        for site in run_map._touched:
            if run_counters[site] > global_counters[site]:
                global_counters[site] = run_counters[site]
                global_map._touched.add(site)
    return new
