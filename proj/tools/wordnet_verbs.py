#!/usr/bin/env python3
"""Convert a WordNet 3.0 ``data.verb`` file into a hypertree edge list.

Every verb synset becomes a node labelled ``lemma.v.offset``. Each synset is
attached to its first hypernym (pointer ``@``) that does not close a cycle
(WordNet 3.0 has one: restrain <-> inhibit); synsets left without a parent
hang off a synthetic root so the result is a single tree. Output lines are
``child<TAB>parent``.

    python3 tools/wordnet_verbs.py path/to/data.verb data/wordnet_verbs.tsv
"""

import argparse
import collections
import sys

ROOT = "verb.root"


def parse_synsets(path):
    synsets = {}
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line in fh:
            if line.startswith("  "):
                continue  # license preamble
            fields = line.split(" | ", 1)[0].split()
            offset = fields[0]
            word_count = int(fields[3], 16)
            lemma = fields[4]
            pos = 4 + 2 * word_count
            pointer_count = int(fields[pos])
            hypernyms = []
            for k in range(pointer_count):
                symbol, target, target_pos = fields[pos + 1 + 4 * k: pos + 4 + 4 * k]
                if symbol == "@" and target_pos == "v":
                    hypernyms.append(target)
            synsets[offset] = (f"{lemma}.v.{offset}", hypernyms)
    return synsets


def choose_parents(synsets):
    parent = {}

    def reaches(start, goal):
        node = start
        while node is not None:
            if node == goal:
                return True
            node = parent.get(node)
        return False

    for offset in sorted(synsets):
        for candidate in synsets[offset][1]:
            if candidate in synsets and not reaches(candidate, offset):
                parent[offset] = candidate
                break
    return parent


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("data_verb")
    parser.add_argument("out")
    args = parser.parse_args(argv)

    synsets = parse_synsets(args.data_verb)
    parents = choose_parents(synsets)
    children = collections.Counter()
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        out.write("# WordNet 3.0 verb hypernym tree (first hypernym per synset)\n")
        for offset in sorted(synsets):
            label = synsets[offset][0]
            parent = synsets[parents[offset]][0] if offset in parents else ROOT
            children[parent] += 1
            out.write(f"{label}\t{parent}\n")
    print(f"{len(synsets) + 1} nodes, {len(synsets)} edges, "
          f"max children {max(children.values())}", file=sys.stderr)


if __name__ == "__main__":
    main()
