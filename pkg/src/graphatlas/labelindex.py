"""Substring-searchable index over node labels.

A plain prefix trie cannot answer "label contains keyword", so the tree
holds every suffix of every indexed string: a keyword is a substring of a
label exactly when it is a prefix of one of the label's suffixes. Lookup
walks the keyword from the root and collects the string ids in the
reached subtree. Matching is case-insensitive (strings are indexed
lowercased; callers lowercase the keyword via find()).
"""

from __future__ import annotations

_IDS = ""  # key for the id list inside a node; cannot collide with a char


class SuffixTrie:
    def __init__(self, strings: list[str]):
        self.count = len(strings)
        self._root: dict = {}
        for sid, s in enumerate(strings):
            low = s.lower()
            for start in range(len(low)):
                node = self._root
                for ch in low[start:]:
                    node = node.setdefault(ch, {})
                node.setdefault(_IDS, []).append(sid)

    def find(self, keyword: str) -> list[int]:
        """Ids of strings containing keyword (case-insensitive), ascending."""
        node = self._root
        for ch in keyword.lower():
            node = node.get(ch)
            if node is None:
                return []
        found: set[int] = set()
        stack = [node]
        while stack:
            cur = stack.pop()
            for key, val in cur.items():
                if key == _IDS:
                    found.update(val)
                else:
                    stack.append(val)
        return sorted(found)
