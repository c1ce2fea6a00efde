#!/usr/bin/env python3
"""Build the bundled gold annotation set.

Positives are written with inline markup, {{type|text}}, which is stripped
while recording character offsets. Negatives are plain comment text.
Output: crates/core/data/gold.jsonl (one AnnotatedComment per line).
"""

import json
import random
import re
import sys
from pathlib import Path

TYPES = {
    "a": "author", "t": "title", "y": "year", "v": "booktitle_or_journal",
    "p": "pages", "vol": "volume", "n": "number", "m": "month", "u": "url",
    "pub": "publisher", "addr": "address", "doi": "doi", "isbn": "isbn", "issn": "issn",
}
STRIPPED = set("\n/*\\#!")
MARK = re.compile(r"\{\{(\w+)\|(.*?)\}\}")


def parse(marked):
    text, spans, pos = [], [], 0
    for m in MARK.finditer(marked):
        text.append(marked[pos:m.start()])
        start = len("".join(text))
        text.append(m.group(2))
        spans.append({"start": start, "end": start + len(m.group(2)), "type": TYPES[m.group(1)]})
        pos = m.end()
    text.append(marked[pos:])
    return "".join(text), spans


def check_normalized(text):
    bad = STRIPPED.intersection(text)
    if bad or "  " in text or text != text.strip():
        sys.exit(f"not in normalized form ({sorted(bad)}): {text!r}")


def mk(etype, s):
    return "{{%s|%s}}" % (etype, s)


# (authors as (given, surname)), title, venue, year, volume, number, pages, month
PUBS = [
    ([("D. L.", "Shell")], "A high-speed sorting procedure", "Communications of the ACM", 1959, 2, 7, "30-32", "July"),
    ([("Robert L.", "Smith")], "Algorithm 116: Complex division", "Communications of the ACM", 1962, 5, 8, "435", "August"),
    ([("Immo O.", "Kerner")], "Algorithm 283: Simultaneous displacement of polynomial roots if real and simple", "Commun. ACM", 1966, 9, 4, "273", None),
    ([("Robert G.", "Tantzen")], "Algorithm 199: conversions between calendar date and Julian day number", "Commun. ACM", 1963, 6, 8, "444", None),
    ([("G.", "Marsaglia")], "Generating discrete random variables in a computer", "Commun. ACM", 1963, 6, 1, "37-38", None),
    ([("Paul", "Friedland")], "Algorithm 312: Absolute value and square root of a complex number", "CACM", 1967, 10, 10, "665", None),
    ([("Jay", "Earley")], "An efficient context-free parsing algorithm", "Communications of the ACM", 1970, 13, 2, "94-102", "February"),
    ([("J. P.", "Chandler"), ("W. C.", "Harrison")], "Remark on algorithm 201: shellsort", "Commun. ACM", 1970, 13, 6, "373-374", None),
    ([("J. H.", "Ahrens"), ("U.", "Dieter")], "Computer methods for sampling from the exponential and normal distributions", "Communications of the ACM", 1972, 15, 10, "873-882", None),
    ([("Alfred V.", "Aho"), ("Margaret J.", "Corasick")], "Efficient string matching: an aid to bibliographic search", "Communications of the ACM", 1975, 18, 6, "333-340", "June"),
    ([("Jack", "Bresenham")], "A linear algorithm for incremental digital display of circular arcs", "Commun. ACM", 1977, 20, 2, "100-106", None),
    ([("R. C. H.", "Cheng")], "Generating beta variates with nonintegral shape parameters", "Communications of the ACM", 1978, 21, 4, "317-322", "April"),
    ([("Michael A.", "Malcolm")], "Algorithms to reveal properties of floating-point arithmetic", "Commun. ACM", 1972, 15, 11, "949-951", None),
    ([("W. Morven", "Gentleman"), ("Scott B.", "Marovich")], "More on algorithms that reveal properties of floating point arithmetic units", "Communications of the ACM", 1974, 17, 5, "276-277", None),
    ([("W. R.", "Franta"), ("Kurt", "Maly")], "An efficient data structure for the simulation event set", "Commun. ACM", 1977, 20, 8, "596-602", None),
    ([("E. R.", "Fiala"), ("D. H.", "Greene")], "Data compression with finite windows", "Communications of the ACM", 1989, 32, 4, "490-505", "April"),
    ([("S. K.", "Park"), ("K. W.", "Miller")], "Random number generators: good ones are hard to find", "Communications of the ACM", 1988, 31, 10, "1192-1201", "October"),
    ([("Reinhold P.", "Weicker")], "Dhrystone: a synthetic systems programming benchmark", "Communications of the ACM", 1984, 27, 10, "1013-1030", None),
    ([("Per-Ake", "Larson")], "Dynamic hash tables", "Commun. ACM", 1988, 31, 4, "446-457", None),
    ([("Richard J.", "Cichelli")], "Minimal perfect hash functions made simple", "Communications of the ACM", 1980, 23, 1, "17-19", "January"),
    ([("J. H.", "Ahrens"), ("U.", "Dieter")], "Generating gamma variates by a modified rejection technique", "Commun. ACM", 1982, 25, 1, "47-54", None),
    ([("Ian H.", "Witten"), ("Radford M.", "Neal"), ("John G.", "Cleary")], "Arithmetic coding for data compression", "Communications of the ACM", 1987, 30, 6, "520-540", "June"),
    ([("Bala R.", "Vatti")], "A generic solution to polygon clipping", "Communications of the ACM", 1992, 35, 7, "56-63", "July"),
    ([("Peter K.", "Pearson")], "Fast hashing of variable-length text strings", "Commun. ACM", 1990, 33, 6, "677-680", None),
    ([("William", "Pugh")], "Skip lists: a probabilistic alternative to balanced trees", "Communications of the ACM", 1990, 33, 6, "668-676", "June"),
    ([("David F.", "Carta")], "Two fast implementations of the minimal standard random number generator", "Commun. ACM", 1990, 33, 1, "87-88", None),
    ([("Edward A.", "Fox"), ("Lenwood S.", "Heath"), ("Qi Fan", "Chen"), ("Amjad M.", "Daoud")], "Practical minimal perfect hash functions for large databases", "Communications of the ACM", 1992, 35, 1, "105-121", None),
    ([("George", "Marsaglia")], "Seeds for random number generators", "Commun. ACM", 2003, 46, 5, "90-93", "May"),
    ([("M.", "Matsumoto"), ("T.", "Nishimura")], "Mersenne twister: a 623-dimensionally equidistributed uniform pseudo-random number generator", "ACM Transactions on Modeling and Computer Simulation", 1998, 8, 1, "3-30", "January"),
    ([("Makoto", "Matsumoto"), ("Yoshiharu", "Kurita")], "Twisted GFSR generators", "ACM Transactions on Modeling and Computer Simulation", 1992, 2, 3, "179-194", None),
    ([("D. E.", "Knuth")], "Literate Programming", "The Computer Journal", 1984, 27, 2, "97-111", None),
    ([("Christopher J.", "Van Wyk")], "Literate programming", "Communications of the ACM", 1989, 32, 6, "740-755", "June"),
    ([("J. R.", "Shewchuk")], "Adaptive precision floating-point arithmetic and fast robust geometric predicates", "Discrete & Computational Geometry", 1997, 18, 3, "305-363", None),
    ([("T.", "Moller"), ("B.", "Trumbore")], "Fast, minimum storage ray-triangle intersection", "Journal of Graphics Tools", 1997, 2, 1, "21-28", None),
    ([("R. W.", "Floyd")], "Algorithm 97: Shortest path", "Communications of the ACM", 1962, 5, 6, "345", "June"),
    ([("W. J.", "Cody")], "Rational Chebyshev approximations for the error function", "Mathematics of Computation", 1969, 23, 107, "631-637", None),
    ([("Jack J.", "Dongarra"), ("Jeremy", "Du Croz"), ("Sven", "Hammarling"), ("Iain S.", "Duff")], "A set of level 3 basic linear algebra subprograms", "ACM Transactions on Mathematical Software", 1990, 16, 1, "1-17", "March"),
    ([("Burton H.", "Bloom")], "Space time trade-offs in hash coding with allowable errors", "Communications of the ACM", 1970, 13, 7, "422-426", "July"),
    ([("Leslie", "Lamport")], "Time, clocks, and the ordering of events in a distributed system", "Communications of the ACM", 1978, 21, 7, "558-565", "July"),
    ([("Tomas", "Akenine-Moller")], "Fast 3D triangle-box overlap testing", "Journal of Graphics Tools", 2001, 6, 1, "29-33", None),
    ([("P.", "L'Ecuyer")], "Tables of maximally equidistributed combined LFSR generators", "Mathematics of Computation", 1999, 68, 225, "261-269", None),
    ([("Ken", "Perlin")], "Improving noise", "ACM Transactions on Graphics", 2002, 21, 3, "681-682", "July"),
    ([("Tony F.", "Chan"), ("Gene H.", "Golub"), ("Randall J.", "LeVeque")], "Algorithms for computing the sample variance: analysis and recommendations", "The American Statistician", 1983, 37, 3, "242-247", None),
    ([("B. P.", "Welford")], "Note on a method for calculating corrected sums of squares and products", "Technometrics", 1962, 4, 3, "419-420", None),
    ([("J. W.", "Cooley"), ("J. W.", "Tukey")], "An algorithm for the machine calculation of complex Fourier series", "Mathematics of Computation", 1965, 19, 90, "297-301", "April"),
    ([("Leo", "Breiman")], "Random forests", "Machine Learning", 2001, 45, 1, "5-32", None),
    ([("D. G.", "Lowe")], "Distinctive image features from scale-invariant keypoints", "International Journal of Computer Vision", 2004, 60, 2, "91-110", None),
    ([("R. E.", "Tarjan")], "Depth-first search and linear graph algorithms", "SIAM Journal on Computing", 1972, 1, 2, "146-160", None),
    ([("Hans-J.", "Boehm"), ("Mark", "Weiser")], "Garbage collection in an uncooperative environment", "Software: Practice and Experience", 1988, 18, 9, "807-820", "September"),
    ([("Peter", "Elias")], "Universal codeword sets and representations of the integers", "IEEE Transactions on Information Theory", 1975, 21, 2, "194-203", "March"),
    ([("Yoav", "Freund"), ("Robert E.", "Schapire")], "A decision-theoretic generalization of on-line learning and an application to boosting", "Journal of Computer and System Sciences", 1997, 55, 1, "119-139", None),
    ([("John", "Canny")], "A computational approach to edge detection", "IEEE Transactions on Pattern Analysis and Machine Intelligence", 1986, 8, 6, "679-698", "November"),
    ([("E. W.", "Dijkstra")], "A note on two problems in connexion with graphs", "Numerische Mathematik", 1959, 1, None, "269-271", None),
    ([("Tomas", "Moller")], "A fast triangle-triangle intersection test", "Journal of Graphics Tools", 1997, 2, 2, "25-30", None),
]


def initials_first(given, surname):
    return f"{given} {surname}"


def surname_first(given, surname):
    inits = " ".join(part[0] + "." for part in given.replace("-", " ").split())
    return f"{surname}, {inits}"


def author_list(authors, style, joiner):
    names = [mk("a", style(g, s)) for g, s in authors]
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + joiner + names[-1]


def fmt(i, pub):
    authors, title, venue, year, vol, num, pages, month = pub
    t, v, y = mk("t", title), mk("v", venue), mk("y", str(year))
    style = i % 8
    if style == 0:
        A = author_list(authors, initials_first, " and ")
        num_part = f" ({mk('n', str(num))})" if num else ""
        return f"{A}. {t}. {v}, {mk('vol', str(vol))}{num_part}, {mk('p', pages)}, {y}."
    if style == 1:
        A = author_list(authors, surname_first, " and ")
        return f"{A} ({y}). {t}. {v} {mk('vol', str(vol))}, {mk('p', pages)}."
    if style == 2:
        A = author_list(authors, initials_first, ", ")
        parts = [f"{A}, \"{t}\", {v}", mk("vol", f"Vol. {vol}")]
        if num:
            parts.append(mk("n", f"No. {num}"))
        parts.append(mk("p", f"pp. {pages}"))
        when = f"{mk('m', month)} {y}" if month else y
        return ", ".join(parts) + f", {when}."
    if style == 3:
        A = author_list(authors, initials_first, " & ")
        return f"{A}: {t}. In: {v}, {y}"
    if style == 4:
        A = author_list(authors, surname_first, "; ")
        when = f"{mk('m', month)} {y}" if month else y
        return f"{A}, {t}, {v}, {when}, {mk('vol', 'vol. ' + str(vol))}, {mk('p', 'pp. ' + pages)}"
    if style == 5:
        A = author_list(authors, initials_first, " and ")
        return f"{t}, by {A}, {v} {mk('vol', str(vol))} ({y}) {mk('p', pages)}"
    if style == 6:
        A = author_list(authors, surname_first, ", and ")
        return f"{A}. {y}. {t}. {v} {mk('vol', str(vol))}, {mk('p', pages)}"
    A = author_list(authors, initials_first, " and ")
    return f"{A}, {t}, {v}, {y}"


PREFIXES = [
    "", "Reference: ", "Based on ", "See ", "Algorithm from ", "Implements the method described in ",
    "For details see ", "Ported from the pseudo-code in ", "This follows ", "[1] ",
]
SUFFIXES = [
    "", " Used for seeding the generator.", " This implementation follows the paper closely.",
    " Modified to use 64-bit arithmetic.", " Constants are taken from table 2.", "",
]

HANDWRITTEN = [
    # the degenerate-title example: tagger-style labels as printed
    "TYPE-I Lorentzian, {{a|Becker , P. J.}} & {{a|Coppens, P.}} ( {{y|1974}} ). {{t|Acta Cryst}} . {{v|A30}} , {{vol|129}} ;",
    "This program is intended to be pedagogic. Specifically, this program was the basis of the {{t|Literate Programming}} column which appeared in the {{v|Communications of the ACM}} (CACM), in the {{m|June}} {{y|1989}} issue ({{vol|32}}, {{n|6}}, {{p|740-755}}).",
    "Finds rules according to confirmation measure (Tertius-type algorithm).<br > <br > For more information see:<br > <br > {{a|P. A. Flach}}, {{a|N. Lachiche}} ({{y|1999}}). {{t|Confirmation-Guided Discovery of first-order rules with Tertius}}. {{v|Machine Learning}}. {{p|42:61-95}}.",
    "Implementation of the HiCO algorithm, an algorithm for detecting hierarchies of correlation clusters. <p> Reference: {{a|E. Achtert}}, {{a|C. Böhm}}, {{a|P. Kröger}}, {{a|A. Zimek}}:<br > {{t|Mining Hierarchies of Correlation Clusters}}. <br> In: {{v|Proc. Int. Conf. on Scientific and Statistical Database Management}} (SSDBM'06), {{addr|Vienna, Austria}}, {{y|2006}}. < p>",
    "Many wavelet coefficient thresholding approaches have been proposed. By default, ``denoise_wavelet`` applies BayesShrink, which is an adaptive thresholding method that computes separate thresholds for each wavelet sub-band as described in [1]_. References ---------- .. [1] {{a|Chang, S. Grace}}, {{a|Bin Yu}}, and {{a|Martin Vetterli}}. \"{{t|Adaptive wavelet thresholding for image denoising and compression}}.\" {{v|Image Processing, IEEE Transactions on}} {{vol|9.9}} ({{y|2000}}): {{p|1532-1546}}. DOI: {{doi|10.1109 83.862633}}",
    "In this implementation, step c is not performed using the usual Chien search. Instead, an alternative approach described in [1] is used. It consists in factoring the error locator polynomial using the Berlekamp Trace algorithm [1] {{a|B. Biswas}}, {{a|V. Herbert}}. {{t|Efficient root finding of polynomials over fields of characteristic 2}}, in: {{v|Western European Workshop on Research in Cryptology}} - WEWoRC 2009, {{addr|Graz, Austria}}, LNCS, {{pub|Springer}}, {{m|July}} {{y|2009}}, to appear.",
    ".. [1] {{a|Max Jaderberg}}, {{a|Karen Simonyan}}, {{a|Andrew Zisserman}}, {{a|Koray Kavukcuoglu}} ({{y|2015}}): {{t|Spatial Transformer Networks}}. {{v|NIPS}} 2015, {{u|http: papers.nips.cc paper 5854-spatial-transformer-networks.pdf}}",
    "Compute the window-convoled power spectrum multipoles, for a data set with non-trivial survey geometry. References ---------- {{a|Bianchi, Davide}} et al., `{{t|Measuring line-of-sight-dependent Fourier-space clustering using FFTs}}`, {{v|MNRAS}}, {{y|2015}} {{a|Scoccimarro, Roman}}, `{{t|Fast estimators for redshift-space clustering}}`, {{v|Phys. Review D}}, {{y|2015}}",
    "Brent's method. See {{a|R. P. Brent}}, {{t|Algorithms for Minimization without Derivatives}}, {{pub|Prentice-Hall}}, {{addr|Englewood Cliffs, NJ}}, {{y|1973}}. ISBN {{isbn|0-13-022335-2}}.",
    "Algorithm M from {{a|Donald E. Knuth}}, {{t|The Art of Computer Programming, Volume 2: Seminumerical Algorithms}}, {{pub|Addison-Wesley}}, {{addr|Reading, MA}}, {{y|1981}}, {{p|pp. 32-33}}.",
    "Adapted from {{a|W. H. Press}}, {{a|S. A. Teukolsky}}, {{a|W. T. Vetterling}} and {{a|B. P. Flannery}}, {{t|Numerical Recipes in C}}, {{pub|Cambridge University Press}}, {{addr|Cambridge}}, {{y|1992}}. ISBN {{isbn|0-521-43108-5}}",
    "{{a|G. Marsaglia}} and {{a|W. W. Tsang}}, \"{{t|The ziggurat method for generating random variables}}\", {{v|Journal of Statistical Software}}, {{vol|vol. 5}}, {{n|no. 8}}, {{p|pp. 1-7}}, {{y|2000}}. doi: {{doi|10.18637 jss.v005.i08}}",
    "Decision tree induction as in {{a|J. R. Quinlan}}. {{t|C4.5: Programs for Machine Learning}}. {{pub|Morgan Kaufmann}}, {{addr|San Mateo, CA}}, {{y|1993}}.",
    "{{a|J. Canny}}, \"{{t|A computational approach to edge detection}}\", {{v|IEEE Transactions on Pattern Analysis and Machine Intelligence}}, {{vol|vol. 8}}, {{n|no. 6}}, {{p|pp. 679-698}}, {{m|Nov.}} {{y|1986}}, doi: {{doi|10.1109 TPAMI.1986.4767851}}",
    "Fast inverse error function. {{a|M. Giles}}, \"{{t|Approximating the erfinv function}}\", in {{v|GPU Computing Gems}}, {{pub|Morgan Kaufmann}}, {{y|2011}}, {{p|pp. 109-116}}. ISSN {{issn|1234-5679}}",
    "The PCG family is described in {{a|Melissa E. O'Neill}}, {{t|PCG: A Family of Simple Fast Space-Efficient Statistically Good Algorithms for Random Number Generation}}, {{v|Technical Report HMC-CS-2014-0905}}, {{y|2014}}. {{u|https: www.pcg-random.org paper.html}}",
    "Two references: [1] {{a|S. K. Park}} and {{a|K. W. Miller}}, {{t|Random number generators: good ones are hard to find}}, {{v|Commun. ACM}} {{vol|31}} ({{y|1988}}) {{p|1192-1201}}. [2] {{a|D. F. Carta}}, {{t|Two fast implementations of the minimal standard random number generator}}, {{v|Commun. ACM}} {{vol|33}} ({{y|1990}}) {{p|87-88}}.",
    "[1] {{a|Matsumoto, M.}} and {{a|Nishimura, T.}}, {{t|Mersenne Twister}}, {{v|ACM Trans. Model. Comput. Simul.}} {{vol|8}} ({{y|1998}}) {{p|3-30}}. [2] {{a|Matsumoto, M.}} and {{a|Kurita, Y.}}, {{t|Twisted GFSR generators}}, {{v|ACM Trans. Model. Comput. Simul.}} {{vol|2}} ({{y|1992}}) {{p|179-194}}. [3] {{a|L'Ecuyer, P.}}, {{t|Maximally equidistributed combined Tausworthe generators}}, {{v|Mathematics of Computation}} {{vol|65}} ({{y|1996}}) {{p|203-213}}.",
]

FIRST = ["John", "Maria", "Wei", "Anna", "Peter", "Laura", "Kenji", "Sofia", "David", "Elena", "Tom", "Nils",
         "Trond", "Timothy", "Ravi", "Chen", "Oliver", "Ingrid", "Paul", "Yuki"]
LAST = ["Smith", "Garcia", "Zhang", "Novak", "Meyer", "Rossi", "Tanaka", "Silva", "Brown", "Petrov", "Nguyen",
        "Peters", "Lossius", "Place", "Kumar", "Li", "Walker", "Berg", "Martin", "Sato"]
USERS = ["jdoe", "msmith", "wzhang", "anovak", "pmeyer", "lrossi", "ktanaka", "ssilva"]
PROJECTS = ["libfoo", "the parser", "this module", "netkit", "the scheduler", "imgtool", "the VM", "dspSpatLib"]
TASKS = ["remove the global lock", "handle EINTR", "support UTF-16 input", "cache the lookup table",
         "check for overflow", "free the buffer on error", "validate the header", "make this thread safe"]
CODE = [
    "Compute the checksum of the buffer and return it.",
    "Returns true if the node is a leaf.",
    "Swap the two halves of the array in place.",
    "Initialize the lookup table on first use.",
    "Skip whitespace and comments before the next token.",
    "The caller owns the returned string and must free it.",
    "Round to the nearest even value when exactly halfway.",
    "This function is not reentrant.",
    "Convert the timestamp to local time using the system zone.",
    "Flush pending writes before closing the descriptor.",
    "Binary search over the sorted keys; returns -1 if absent.",
    "Retry the request up to three times with exponential backoff.",
    "Map the page read-only so that writes fault.",
    "Parse the command line options and fill in the config struct.",
    "Hash the key with FNV-1a and reduce modulo the table size.",
    "Clamp the color components to the range 0 to 255.",
    "Keep this list sorted; the lookup relies on it.",
    "Decode a base64 string into raw bytes.",
    "Called from the interrupt handler, so do not allocate here.",
    "Walk the tree in post order and release every node.",
]
IEEE = [
    "IEEE 754 double precision rounding is assumed here.",
    "Convert to IEEE-754 single precision, flushing denormals to zero.",
    "Follows IEEE Std 1003.1 for the semantics of getopt.",
    "MAC addresses as defined in IEEE 802.3.",
    "Handles the IEEE 1284 parallel port negotiation phase.",
    "Check for IEEE NaN using the exponent bits.",
    "Use the IEEE_754 quiet NaN pattern as a sentinel.",
    "JTAG boundary scan as in IEEE 1149.1.",
    "Implements CRC-32 from IEEE 802.3 using the reflected polynomial.",
    "Not all platforms provide IEEE floating point; see the configure check.",
]


def negatives(rng):
    out = set()
    license_header = ("@file @ingroup dspSpatLib @brief TODO @details TODO @n @authors Trond Lossius, Nils Peters, "
            "Timothy Place @copyright Copyright © 2011 by Trond Lossius, Nils Peters, and Timothy Place @n "
            "This code is licensed under the terms of the `` New BSD License '' @n http: creativecommons.org licenses BSD .")
    out.add(license_header)
    def name():
        return f"{rng.choice(FIRST)} {rng.choice(LAST)}"
    def year():
        return str(rng.randint(1995, 2020))
    templates = [
        lambda: f"Copyright (c) {year()} {name()}. All rights reserved. Licensed under the Apache License, Version 2.0 (the \"License\"); you may not use this file except in compliance with the License.",
        lambda: f"Copyright (C) {year()}-{year()} {name()} and {name()}. This program is free software; you can redistribute it and or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.",
        lambda: f"@file {rng.choice(PROJECTS)} @author {name()} @date {year()} @copyright Copyright {year()} by {name()}, {name()} and {name()}. This code is licensed under the terms of the MIT License.",
        lambda: f"Author: {name()} <{rng.choice(USERS)}@acm.org> Created: {year()}",
        lambda: f"Maintainer: {name()} ({rng.choice(USERS)}@cs.example.edu), last modified {rng.choice(['March', 'June', 'October'])} {year()}.",
        lambda: f"TODO({rng.choice(USERS)}): {rng.choice(TASKS)} before the {year()} release.",
        lambda: f"Created by {name()} on {rng.randint(1, 28)} {rng.choice(['Jan', 'Feb', 'Mar', 'Sep'])} {year()}. Copyright {year()} {name()}.",
        lambda: f"Thanks to {name()} for the patch ({year()}). {rng.choice(CODE)}",
        lambda: f"Modified {year()} by {name()} to {rng.choice(TASKS)}.",
        lambda: f"See RFC {rng.choice([2616, 3986, 5322, 7230, 1952])} section {rng.randint(2, 9)}.{rng.randint(1, 9)} for the details of this field.",
        lambda: f"Version {rng.randint(0, 4)}.{rng.randint(0, 20)}.{rng.randint(0, 9)} ({year()}-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}): {rng.choice(TASKS)}.",
        lambda: rng.choice(CODE) + " " + rng.choice(CODE),
        lambda: rng.choice(IEEE) + " " + rng.choice(CODE),
        lambda: f"Written by {name()}, {year()}. Based on earlier work by {name()}. Send bug reports to {rng.choice(USERS)}@acm.org.",
        lambda: f"Portions Copyright {year()} {name()}. Distributed under the Boost Software License, Version 1.0. See http: www.boost.org LICENSE_1_0.txt",
        lambda: f"FIXME: {rng.choice(TASKS)}; reported by {name()} in issue {rng.randint(10, 9999)}.",
        lambda: f"Member of the ACM since {year()}; contact {name()} for access to the ACM digital library mirror.",
        lambda: f"{rng.choice(CODE)} Tested with GCC {rng.randint(4, 12)}.{rng.randint(0, 4)} on {rng.choice(['Linux', 'FreeBSD', 'macOS'])}.",
    ]
    while len(out) < 170:
        out.add(rng.choice(templates)())
    for t in IEEE + CODE:
        out.add(t)
    return sorted(out)


def main():
    root = Path(__file__).resolve().parent.parent
    rng = random.Random(20240611)
    positives = []
    for i, pub in enumerate(PUBS):
        body = fmt(i, pub)
        pre = PREFIXES[i % len(PREFIXES)]
        suf = SUFFIXES[i % len(SUFFIXES)]
        positives.append(pre + body + suf)
    positives.extend(HANDWRITTEN)

    rows = []
    for marked in positives:
        text, spans = parse(marked)
        check_normalized(text)
        if not spans:
            sys.exit(f"positive without spans: {text!r}")
        rows.append({"text": text, "entities": spans})
    for text in negatives(rng):
        check_normalized(text)
        rows.append({"text": text, "entities": []})

    # stable interleaving so a file prefix is not all positives
    rng.shuffle(rows)
    seen_types = {s["type"] for r in rows for s in r["entities"]}
    missing = set(TYPES.values()) - seen_types
    if missing:
        sys.exit(f"entity types never annotated: {sorted(missing)}")
    texts = [r["text"] for r in rows]
    if len(set(texts)) != len(texts):
        sys.exit("duplicate texts")

    out = root / "crates" / "core" / "data" / "gold.jsonl"
    with out.open("w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    pos = sum(1 for r in rows if r["entities"])
    print(f"wrote {len(rows)} comments ({pos} citing, {len(rows) - pos} not) to {out}")


if __name__ == "__main__":
    main()
