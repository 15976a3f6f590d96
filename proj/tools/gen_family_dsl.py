#!/usr/bin/env python3
"""Writes data/family.cooldsl from the kinship tables below.

The C++ kinship module keeps its own copy of the lexicon and graph oracle;
the composition table here is what the rules encode.
"""
import argparse
import pathlib

LEXICON = {
    "child": ("son", "daughter"),
    "parent": ("father", "mother"),
    "sibling": ("brother", "sister"),
    "spouse": ("husband", "wife"),
    "grandchild": ("grandson", "granddaughter"),
    "grandparent": ("grandfather", "grandmother"),
    "pibling": ("uncle", "aunt"),
    "nibling": ("nephew", "niece"),
    "child-in-law": ("son-in-law", "daughter-in-law"),
    "parent-in-law": ("father-in-law", "mother-in-law"),
    "sibling-in-law": ("brother-in-law", "sister-in-law"),
}

INVERSE = {
    "child": "parent",
    "parent": "child",
    "sibling": "sibling",
    "spouse": "spouse",
    "grandchild": "grandparent",
    "grandparent": "grandchild",
    "pibling": "nibling",
    "nibling": "pibling",
    "child-in-law": "parent-in-law",
    "parent-in-law": "child-in-law",
    "sibling-in-law": "sibling-in-law",
}

# COMPOSE[r1][r2]: if q is b's r1 and p is q's r2, then p is b's result.
COMPOSE = {
    "child": {"child": "grandchild", "parent": "spouse", "sibling": "child", "spouse": "child-in-law"},
    "parent": {"child": "sibling", "parent": "grandparent", "sibling": "pibling", "spouse": "parent"},
    "sibling": {"child": "nibling", "parent": "parent", "sibling": "sibling", "spouse": "sibling-in-law",
                "grandparent": "grandparent", "pibling": "pibling"},
    "spouse": {"child": "child", "parent": "parent-in-law", "sibling": "sibling-in-law",
               "grandchild": "grandchild", "child-in-law": "child-in-law", "nibling": "nibling"},
    # grandchild's pibling defaults to child, as in crowd-sourced kinship corpora
    "grandchild": {"sibling": "grandchild", "pibling": "child"},
    "grandparent": {"spouse": "grandparent"},
    "pibling": {"spouse": "pibling"},
    "nibling": {"sibling": "nibling"},
    "child-in-law": {"spouse": "child", "child": "grandchild"},
    "parent-in-law": {"spouse": "parent-in-law"},
    # the parent default only holds for a spouse's sibling
    "sibling-in-law": {"child": "nibling", "parent": "parent-in-law"},
}

I = "    "


def separation(lines):
    lines.append("//1 Separate relations and genders")
    for rel, (male, female) in LEXICON.items():
        inv = INVERSE[rel]
        for noun, gender in ((male, "male"), (female, "female")):
            lines.append(f"expr:@(9){{(a) is (b)s {noun}}}{{")
            lines.append(f"{I}return:(a) is {gender} & (a) is (b)s {rel} & (b) is (a)s {inv};")
            lines.append("}")
    lines.append("")


def inverses(lines):
    lines.append("//2 Inverse relations")
    for rel, inv in INVERSE.items():
        lines.append(f"expr:@(0,7){{(a) is (b)s {rel}}}{{")
        lines.append(f"{I}if(this expr.exist subexpr{{(b) is (a)s {inv}}} == false){{")
        lines.append(f"{I}{I}return:(a) is (b)s {rel} & (b) is (a)s {inv};")
        lines.append(f"{I}}}")
        lines.append(f"{I}abort;")
        lines.append("}")
    lines.append("")


def indirect(lines):
    lines.append("//3 Indirect relations, closed over every pair of people")
    for r1, row in COMPOSE.items():
        lines.append(f"expr:@(0,0,5){{(q) is (b)s {r1}}}{{")
        lines.append(f"{I}placeholder:p;")
        for r2, result in row.items():
            lines.append(f"{I}while(this expr.find subexpr{{(p) is (q)s {r2}}}){{")
            lines.append(f"{I}{I}if(p != b && this expr.exist subexpr{{(p) is (b)s #r}} == false){{")
            lines.append(f"{I}{I}{I}return:(q) is (b)s {r1} & (p) is (b)s {result};")
            lines.append(f"{I}{I}}}")
            lines.append(f"{I}{I}p.reset();")
            lines.append(f"{I}}}")
            lines.append(f"{I}p.reset();")
        lines.append(f"{I}abort;")
        lines.append("}")
    # leave the closure as soon as the queried pair is related
    lines.append("expr:@(0,0,12){(a) is (b)s ($relation)}{")
    lines.append(f"{I}if(this expr.exist subexpr{{(a) is (b)s #r}}){{")
    lines.append(f"{I}{I}logicjump(4);")
    lines.append(f"{I}}}")
    lines.append(f"{I}abort;")
    lines.append("}")
    lines.append("")


def recombine(lines):
    lines.append("//4 Recombine relations and genders")
    lines.append("expr:@(0,0,0,8){(a) is (b)s ($relation)}{")
    for rel, (male, female) in LEXICON.items():
        for noun, gender in ((male, "male"), (female, "female")):
            lines.append(f"{I}if(this expr.exist subexpr{{(a) is (b)s {rel}}} && this expr.exist subexpr{{(a) is {gender}}}){{")
            lines.append(f'{I}{I}return:$relation == "{noun}";')
            lines.append(f"{I}}}")
    lines.append(f"{I}abort;")
    lines.append("}")
    lines.append("@(0,0,0,10){#f & #g}{")
    lines.append(f"{I}placeholder:p;")
    lines.append(f"{I}placeholder:v;")
    lines.append(f"{I}if(this expr.find subexpr{{$p == v}}){{")
    lines.append(f"{I}{I}p = v;")
    lines.append(f"{I}}}")
    lines.append(f"{I}abort;")
    lines.append("}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "family.cooldsl"))
    args = ap.parse_args()
    lines = ["// Generated by tools/gen_family_dsl.py", ""]
    separation(lines)
    inverses(lines)
    indirect(lines)
    recombine(lines)
    pathlib.Path(args.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
