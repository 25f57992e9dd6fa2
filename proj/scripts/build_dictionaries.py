#!/usr/bin/env python3
"""Regenerates the bundled word lists under data/.

Sources are the frequency lists and keyboard graphs shipped with the
`zxcvbn` Python package (MIT). Run once; the outputs are committed.

    pip install zxcvbn
    python3 scripts/build_dictionaries.py
"""

import os
import sys

from zxcvbn.adjacency_graphs import ADJACENCY_GRAPHS
from zxcvbn.frequency_lists import FREQUENCY_LISTS

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")

# Passwords commonly shipped as defaults in Java/Android code samples. They are
# not all in the top-10k list, so they are appended to the blacklist.
DEFAULT_CREDENTIALS = [
    "changeit", "dontcare", "android", "password", "secret", "keystore",
    "storepass", "keypass", "123456", "changeme", "default", "admin",
    "letmein", "qwerty", "test", "testing", "pass", "passwd",
]


def write_list(name, header, words):
    path = os.path.join(ROOT, name)
    with open(path, "w", encoding="utf-8") as out:
        for line in header:
            out.write("# " + line + "\n")
        for w in words:
            out.write(w + "\n")
    print(f"{name}: {len(words)} entries")


def take_unique(words, n):
    seen, out = set(), []
    for w in words:
        if w in seen or "\t" in w or "\n" in w or w.startswith("#"):
            continue
        seen.add(w)
        out.append(w)
        if len(out) == n:
            break
    return out


def main():
    os.makedirs(ROOT, exist_ok=True)
    passwords = take_unique(FREQUENCY_LISTS["passwords"], 10000)
    english = take_unique(FREQUENCY_LISTS["english_wikipedia"], 5000)

    names = []
    male = FREQUENCY_LISTS["male_names"]
    female = FREQUENCY_LISTS["female_names"]
    surnames = FREQUENCY_LISTS["surnames"]
    for i in range(1000):
        for src in (surnames, male, female):
            if i < len(src):
                names.append(src[i])
    names = take_unique(names, 1000)

    write_list("passwords.txt", ["ranked common passwords, most frequent first"], passwords)
    write_list("english.txt", ["ranked english words, most frequent first"], english)
    write_list("names.txt", ["ranked first names and surnames, interleaved by rank"], names)

    blacklist = take_unique(passwords + DEFAULT_CREDENTIALS, 10**6)
    for must in ("changeit", "dontcare"):
        if must not in blacklist:
            sys.exit(f"blacklist is missing {must!r}")
    write_list("blacklist.txt",
               ["known-bad passwords: top common passwords plus default credentials"],
               blacklist)

    path = os.path.join(ROOT, "keyboards.txt")
    with open(path, "w", encoding="utf-8") as out:
        out.write("# graph<TAB>key<TAB>neighbour slots (empty slot = no neighbour)\n")
        for graph in ("qwerty", "dvorak", "keypad", "mac_keypad"):
            for key in sorted(ADJACENCY_GRAPHS[graph]):
                slots = [s or "" for s in ADJACENCY_GRAPHS[graph][key]]
                out.write("\t".join([graph, key] + slots) + "\n")
    print("keyboards.txt written")


if __name__ == "__main__":
    main()
