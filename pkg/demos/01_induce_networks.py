"""Induce collaboration networks from a message log.

Builds a tiny synthetic email log for two months, applies the strong-tie
rule (at least 4 messages in a month, at least 1 in each direction), and
prints the resulting monthly and longitudinal graphs.
"""

import io
import random

from orgmap import induce_series, parse_message_log

rng = random.Random(1)
people = ["ana", "bo", "cy", "dee", "eli", "fay"]
strong_pairs = [("ana", "bo"), ("bo", "cy"), ("dee", "eli")]

rows = ["sender,recipient,sent_at"]
for month in ("2024-01", "2024-02"):
    for a, b in strong_pairs:
        for day in range(1, 4):
            rows.append(f"{a},{b},{month}-{day:02d}T09:00:00Z")
            rows.append(f"{b},{a},{month}-{day:02d}T17:00:00Z")
    # background chatter below the threshold
    for _ in range(20):
        a, b = rng.sample(people, 2)
        rows.append(f"{a},{b},{month}-{rng.randint(1, 28):02d}T12:00:00Z")

records, diagnostics = parse_message_log(io.StringIO("\n".join(rows)))
print(f"parsed {len(records)} messages, {len(diagnostics)} rejected rows")

series = induce_series(records)
for month in series.months:
    g = series.graphs[month]
    print(f"{month}: {g.n_nodes} people, {g.n_edges} strong ties")
    for a, b, w in sorted(g.edges()):
        print(f"   {a} <-> {b}  ({w:.0f} messages)")

lcc = series.longitudinal
print(f"longitudinal frame (largest component): {lcc.n_nodes} people, {lcc.n_edges} ties")
