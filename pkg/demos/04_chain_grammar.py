"""Walkthrough: the reasoning-chain wire format.

Chains are plain text with geometry embedded as `<LOC>(...)` boxes and
`<MOT>[...]` trajectories.  Parsing splits steps, extracts elements, and
canonicalizes coordinates to two decimals; serialization is the exact
inverse.  Lenient mode additionally scoops up bare numeric tuples from
models that answer without the special tokens.
"""

from driveqa.chains import extract_visual_elements, parse_chain, serialize

text = (
    "The referred object o1 is a vehicle at the front, located at "
    "<LOC>(412.5,308.25,577.0,419.75). Its future trajectory is "
    "<MOT>[(21.0,0.8),(19.5,0.8),(18.0,0.8)]. Therefore it poses a risk "
    "to the ego vehicle's normal driving."
)
chain = parse_chain(text)
print(f"{len(chain.steps)} steps:")
for i, step in enumerate(chain.steps):
    kinds = [e.kind.value for e in step.elements]
    print(f"  step {i}: elements={kinds or '-'}  text={step.text[:60]}...")

round_tripped = parse_chain(serialize(chain))
print("\nround trip preserves structure:", round_tripped == chain)
print("canonical form:", serialize(chain)[:100], "...")

# Note the period inside the payload never splits a step.
tricky = parse_chain("Box at <LOC>(1.0,2.0,3.0,4.0). Stop.")
print(f"\npayload periods are protected: {len(tricky.steps)} steps")

# Free-text answers from baseline models: lenient extraction.
free_text = "I think the box is (415, 310, 580, 420) and it moves like [(21, 1), (19, 1)] next"
print("\nstrict extraction finds:", extract_visual_elements(free_text))
for element in extract_visual_elements(free_text, lenient=True):
    print("lenient extraction finds:", element.kind.value, element.payload)
