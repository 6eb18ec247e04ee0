"""Prompt templates for seed generation, decomposition, spec generation and red-teaming.

The template texts are kept verbatim. The seed user template is a
``str.format`` template (doubled braces are literal); the other three use
named slots that are substituted by name, because their bodies contain
literal ``{...}`` placeholders meant for the model.
"""

from __future__ import annotations

import json
import re
from collections.abc import Sequence

from .errors import MissingPrecondText, MissingSlot

SEED_SYSTEM = """\
You are an expert at generating diverse candidate inputs for Lean4 code verification tasks.

Return ONLY a JSON array. Each element must strictly follow:
{"input": {"param1": value1, "param2": value2, ...}}

Rules:
1. Do not output markdown, prose, comments, or code fences.
2. Keys in each `input` object must exactly match the function parameter names: no missing keys, no extra keys.
3. Values must be JSON-serializable and type-compatible with the declared Lean parameter types.
4. Treat the ground-truth precondition as the valid-input boundary: generate both valid and invalid inputs, especially boundary cases.
5. Include both likely-valid and likely-invalid inputs. Treat likely-invalid as semantically violating the precondition, not malformed JSON.
6. Generate diverse and challenging edge-case candidates. Return exactly the number of candidates requested by the user.
"""

SEED_USER = """\
Generate candidate inputs for this Lean4 programming verification task.
Task description:
{description}

Ground-truth precondition:
{precond}

Use of precondition:
- It defines the semantic boundary of valid inputs.
- Generate both inputs that satisfy it and inputs that violate it.
- Focus on hard boundary/edge cases around this condition.
- "likely-invalid" means: still valid JSON and type-compatible, but likely violates the precondition.
Validity mix target:
- total candidates: {candidate_count}
- likely-invalid target: {invalid_target}
- likely-valid target: {valid_target}
- If constraints make exact ratio hard, prioritize exact total count and boundary coverage.

Function parameters (JSON):
{parameters}

Example likely-valid inputs:
{test_examples}

Example likely-invalid inputs (maybe no examples available, but generate if possible):
{reject_examples}

Output format MUST be exactly a JSON array of objects:
[{{"input": {{"param": value, ...}}}}, ...]
"""

DECOMPOSITION = """\
### Role
You are a mathematical modeling expert. Your task is to analyze a programming problem description and produce a structured mathematical model that captures its formal meaning.

### Input
- **Problem Description**: A natural language description of a programming problem.

### Instructions
1. Identify the Input information: 
    a. contents (decleration of the input variables)
    b. constraints of the input
        - type/data structure of the input variables
        - properties of the input variables must satisfy, mark each property with one of the following two keywords 
            (E: Explicit, properties that are stated explicitly in the problem descripition)
            (H: Hypothesis, properties that may be included in the constraints)
2. Identify the Output information:
    a. contents (decleration of the output variables, you can declare them as `res1, res2, ...`)
    b. constraints of the output
        - type/data structure of the output variables
        - properties of the output variables must satisfy, the relationship between the input and the output (eg. elements/ordering preserving, elements inclusion, etc.) 
3. A detailed description of the type of input and output:
   - Figure out the data struture, consider list/tuples and etc.
   - Consider the type of the variables, for example, real numbers, integers, string and etc.  
4. A detailed description of the relationship between the input and the output. You may think through:
   - Does every element of the output originate from the input?
   - Does the output preserve any ordering from the input?
   - Does the output contain all elements from the input that meet some conditions?
5. Unless explicitly stated, do NOT mark non-empty, integer-only, positivity, uniqueness, sortedness and etc. with `E`.
6. Do not add any explanations of the constraints.

### Output Format
You MUST structure your response strictly as follows:

Input:
    a. {contents}
    b. {constraints}
        - {constraints1}
        - {constraints2}
        - ...
Output:
    a. {contents}
    b. {constraints}
        - {constraints1}
        - {constraints2}
        - ...

### Now perform the following task:
- **Problem Description**:
{problem_description}
"""

SPECIFICATION = """\
### Role
You are an expert in Lean4 programming. Your task is to analyze a programming problem description and produce the Lean4 code of its precondition and postcondition.

### Input
- **Problem Description**: A natural language description of a programming problem.
- **Input**: Input of the problem, and constraints on the input.
- **Output**: Output of the problem, and constraints on the output.
- **Precondition Function Signature**: Function signature of the precondition.
- **Postcondition Function Signature**: Function signature of the postcondition.

### Instructions
1. Generate the Lean4 code for the precondition and postcondition according to the Input and Output information. Both the Input and Output have two parts: contents and constraints. Note that you should include all the information provided for you.
2. You should carefully analyze the problem description to help you identify gaps and omissions, thereby capturing any missing details within the Input and Output.
3. Define the Lean4 precondition and postcondition by using the provided function signature.
4. Only translate the constraints of the precondition marked with 'E'. Neglect the constraints marked with 'H'.
5. If auxiliary functions are needed, put them directly before the precondition and postcondition.

### Output Format
You MUST structure your response strictly as follows:
```lean
-- Precondition Implementation
{precondition auxiliary functions, if any. precondition implementation}

-- Postcondition Implementation
{postcondition auxiliary functions, if any. postcondition implementation}
```

### Now perform the task below:
- **Problem Description**:
{problem_description}
- **Input**:
{input}
- **Output**:
{output}
- **Precondition Function Signature**:
{precond_signature}
- **Postcondition Function Signature**:
{postcond_signature}
"""

ADVERSARIAL = """\
### Role
You are an expert Red Teamer in formal verification and a "lazy" code hacker. Your objective is to perform "Specification Gaming": identify underspecification loopholes within a given `post-condition` in Lean4, and write degenerate code to exploit these vulnerabilities.

### Input
- **Problem Description**: A natural language description of a programming problem.
- **Pre-condition**: Defines valid inputs. Assume inputs always pass this.
- **Post-condition**: The flawed contract your output MUST satisfy.
- **Implementation Signatures**: The function signature of the adversarial functions.

### Instructions
1. You MUST NOT write a genuine algorithmic solution to the `Problem Description`. **If your code actually solves the true problem perfectly, you have FAILED your mission.** Your code MUST produce fundamentally WRONG outputs according to the natural language problem, BUT these wrong outputs must magically trick the `post-condition` into evaluating to `True` (or being provable).
2. Carefully analyze the `post-condition`. What crucial constraints from the `Problem Description` did it forget to check? You may consider
   - Did it check `List.length` but forget to check elements?
   - Did it check `List.Sorted` but forget to ensure elements belong to the original list?
   - Did it use `∃` without bounding the witness?
   - Did it use `∀ x ∈ xs` but forget the empty-list case is vacuously true?
3. Here are some adversarial strategies you may consider:
   - *Constant Return*: Return meaningless constants (`0`, `#[]`, `[]`, `""`, `#[0, 0]`, `false`, `none`) if the post-condition fails to bind the output to the input.
   - *Input Echoing*: Return the input parameters directly unmodified (e.g., `fun xs => xs`).
   - *Trivial Synthesis*: Return `List.replicate n 0`, `List.range n`, `Array.mkArray n 0`, or entirely fabricated data that satisfies the shape/type/length constraints.
   - *Malicious Deletion/Modification*: If the post-condition only checks for the absence of something (e.g., "no duplicates", "no negative elements"), delete everything and return `[]` / `#[]`.
   - *Edge Case Exploitation*: Force empty or trivial states (e.g., empty list, `0`, `none`) that make universally quantified checks (`∀ x ∈ []`, ...) vacuously true.
4. Your adversarial functions MUST be pure and total Lean4 functions. You MUST NOT:
   - declare new `axiom`s, use `sorry`, or introduce `opaque` definitions to bypass verification
   - use `unsafe`, `partial`, or non-terminating recursion to avoid producing a real value
   - use `@[implemented_by ...]`, `@[extern ...]`, or any attribute that replaces the compiled behavior of a function
   - register new `instance`s that shadow or override existing typeclass resolution for standard types (`Eq`, `LE`, `LT`, `Decidable`, `Ord`, `BEq`, `Hashable`, etc.)
   - rely on `IO`, `ST`, `IO.Ref`, or any monadic side effects that persist outside the function call
   - use noncomputable definitions or use `choose`, `choose_spec` to define the adversarial functions
   If any strategy requires modifying the ambient environment, DO NOT use it.
5. You MUST NOT use type-level / typeclass / coercion tricks to fake post-condition satisfaction. In particular, DO NOT:
   - define custom `structure`s / `inductive` types as outputs purely so that a custom `DecidableEq`, `LE`, `LT`, or `BEq` instance makes the post-condition trivially true
   - override or re-declare instances such as `BEq`, `DecidableEq`, `LE`, `LT`, `Ord`, `HAdd`, `HSub`, `Membership`, `GetElem` for standard types
   - return proxy/wrapper/sentinel values (e.g., via `Subtype` with a bogus proof, or a wrapper with a custom equality) that are not semantically valid outputs
   - exploit `Decidable` instances whose `decide` always returns `isTrue`
   Outputs must be plain values of the exact types expected by the specification (`Nat`, `Int`, `String`, `List α`, `Array α`, `Option α`, tuples of these, etc.).
6. You must generate exactly **5** different adversarial implementations. Try to use a *different* adversarial strategy from the list above for each one to probe different potential loopholes.
7. The function signatures of your adversarial implementations MUST match the implementation signature provided. Distinguish each adversarial function by appending the suffix `i` to its name, where i denotes the index of the i-th adversarial implementation.
8. DO NOT add any explanations.

### Output Format
You MUST structure your response strictly as follows. Do not include any explanations, and you must provide **5** adversarial implementations.

```lean
-- Adversarial Implementation 1
{adversatial function 1}

-- Adversarial Implementation 2
{adversatial function 2}

-- Adversarial Implementation 3
{adversatial function 3}

-- Adversarial Implementation 4
{adversatial function 4}

-- Adversarial Implementation 5
{adversatial function 5}
```

### Now perform the task below:
- **Problem Description**:
{problem_description}
- **Pre-condition**:
```lean
{pre_condition}
```
- **Post-condition**:
```lean
{post_condition}
```
- **Implementation Signatures**:
```lean
{impl_signature}
```
"""


def fill_slots(template: str, **slots: str) -> str:
    """Substitute ``{name}`` for each given slot in one pass; other braces stay."""
    for name, value in slots.items():
        if value is None or not str(value).strip():
            raise MissingSlot(f"slot {name!r} is empty")
    pattern = re.compile("|".join(re.escape("{" + k + "}") for k in slots))
    return pattern.sub(lambda m: str(slots[m.group(0)[1:-1]]), template)


def _examples(inputs: Sequence, limit: int) -> str:
    return json.dumps([{"input": m.payloads()} for m in list(inputs)[:limit]], ensure_ascii=False)


def render_seed_prompt(task, cfg) -> tuple[str, str]:
    if not task.precond_text.strip():
        raise MissingPrecondText(f"task {task.id} has no precondition source text")
    user = SEED_USER.format(
        description=task.description,
        precond=task.precond_text,
        candidate_count=cfg.candidates_per_round,
        invalid_target=cfg.invalid_target,
        valid_target=cfg.valid_target,
        parameters=json.dumps(task.signature.to_json(), ensure_ascii=False),
        test_examples=_examples(task.base_expected_inputs, cfg.example_limit),
        reject_examples=_examples(task.base_unexpected_inputs, cfg.example_limit),
    )
    return SEED_SYSTEM.rstrip("\n"), user


def render_decomposition_prompt(task) -> tuple[None, str]:
    return None, fill_slots(DECOMPOSITION, problem_description=task.description)


def split_decomposition(text: str) -> tuple[str, str]:
    """Split a decomposition answer into its ``Input:`` and ``Output:`` sections."""
    if not text or not text.strip():
        raise MissingSlot("decomposition is empty")
    m = re.search(r"^\s*Input:\s*$(.*?)^\s*Output:\s*$(.*)", text, re.M | re.S)
    if not m:
        raise MissingSlot("decomposition lacks Input:/Output: sections")
    return m.group(1).strip("\n"), m.group(2).strip("\n")


def render_spec_prompt(task, decomposition: str) -> tuple[None, str]:
    inp, out = split_decomposition(decomposition)
    return None, fill_slots(
        SPECIFICATION,
        problem_description=task.description,
        input=inp,
        output=out,
        precond_signature=task.precond_signature,
        postcond_signature=task.postcond_signature,
    )


def render_adversarial_prompt(task, spec) -> tuple[None, str]:
    return None, fill_slots(
        ADVERSARIAL,
        problem_description=task.description,
        pre_condition=spec.precond_text,
        post_condition=spec.postcond_text,
        impl_signature=task.impl_signature,
    )
