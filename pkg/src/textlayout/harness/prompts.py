"""Prompt templates for each evaluation dataset."""
from __future__ import annotations

from string import Template

from ..datagen.puzzle import puzzle_prompt

DEFAULT_SYSTEM_PROMPT = "You are a helpful assistant."

TEXTLAYOUTQA = Template(
    "Given some shopping lists with different products, you are supposed to enumerate the products "
    "of specific lists and answer questions in the form of a list, for example: ['a', 'b'], reply "
    "with the list only! If you don't know the answer, reply with the empty list [].\n"
    "\n"
    "For example:\n"
    "Here are 2 shopping lists (A, B) with different products:\n"
    "A       B\n"
    "apple   fish\n"
    "banana  chair\n"
    "car\n"
    "Question: What products do shopping list B contain?\n"
    "Answer: ['fish', 'chair']\n"
    "\n"
    "Now answer the question below:\n"
    "${context}\n"
    "\n"
    "Question: ${question}\n"
    "Answer:"
)

XFUNDQA = Template(
    'The following is a form composed of key-value pairs: "${context}". '
    "Please answer according to the given form.\n"
    "Note: The value usually appears near the key. Think carefully and answer with a few words.\n"
    'Question: What is the value of the key "${question}"?\n'
    "Answer:"
)

DOCVQA = Template(
    "Given the context:\n"
    "${context}\n"
    "Use few words to answer the question: ${question}\n"
    "Answer:"
)

FETAQA = Template(
    "Given a table:\n"
    "${context}\n"
    "Answer questions about the table.\n"
    "Note: think step by step.\n"
    "Question: ${question}\n"
    "Answer:"
)

REPHRASE = Template(
    "Given the question and answer pair, rephrase the answer to provide the most straightforward "
    "response to the question with few words in English.\n"
    "\n"
    "Example 1:\n"
    "Question: What is the name of the person in the CC field?\n"
    "Answer: The name of the person in the CC field is Jo Spach.\n"
    "Rephrased answer: Jo Spach\n"
    "\n"
    "Example 2:\n"
    "Question: What is the given document about?\n"
    "Answer: The given document appears to be a summary of an evaluation survey conducted by Telmark "
    "in a particular monthly region in 2014. The survey aimed to evaluate the effectiveness of "
    "Telmark's promotional programs in the region. The document provides information on various "
    "aspects of the survey, including the number of stores that received promotional materials, the "
    "percentage of stores that placed the materials in a visible location, and the number of stores "
    "that participated in the promotion. Additionally, the document includes information on the "
    "wholesale accounts sold by Telmark in the region and the percentage of accounts that refused "
    "the promotion.\n"
    "Rephrased answer: region monthly telmark program evaluation survey\n"
    "\n"
    "Example 3:\n"
    "Question: What is the % of Employees in 2012 based on graph 'Distribution of Value-Added'?\n"
    "Answer: Based on the graph 'Distribution of Value-Added', it can be observed that the "
    "percentage of employees in 2012 is around 80%.\n"
    "Rephrased answer: 80%\n"
    "\n"
    "Now rephrase the answer based on the QA pair:\n"
    "Question: ${question}\n"
    "Answer: ${answer}\n"
    "Rephrased answer:"
)

LLAMA2 = Template("<s>[INST] <<SYS>>\n${system}\n<</SYS>>\n${instruction} [/INST]")

TEMPLATES = {
    "textlayoutqa": TEXTLAYOUTQA,
    "xfundqa": XFUNDQA,
    "docvqa": DOCVQA,
    "fetaqa": FETAQA,
    "rephrase": REPHRASE,
}
KINDS = (*TEMPLATES, "puzzle")


def render_prompt(kind: str, context: str, question: str, answer: str | None = None,
                  preamble: str | None = None) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown prompt kind {kind!r}; choose from {list(KINDS)}")
    if kind == "puzzle":
        return puzzle_prompt(context)
    if kind == "rephrase":
        if answer is None:
            raise ValueError("rephrase prompts need the answer to rephrase")
        return REPHRASE.substitute(question=question, answer=answer)
    if kind == "textlayoutqa" and preamble:
        context = f"{preamble}\n{context}"
    return TEMPLATES[kind].substitute(context=context, question=question)


def build_prompt(kind: str, context: str, question: str, answer: str | None = None, *,
                 preamble: str | None = None, llama_wrapper: bool = False,
                 system_prompt: str | None = None) -> list[dict]:
    """Chat messages for one query.

    ``llama_wrapper`` folds the system prompt and instruction into the
    ``[INST] <<SYS>>`` envelope client-side, for backends that do not apply a
    chat template themselves.
    """
    text = render_prompt(kind, context, question, answer, preamble)
    if llama_wrapper:
        text = LLAMA2.substitute(system=system_prompt or DEFAULT_SYSTEM_PROMPT, instruction=text)
        return [{"role": "user", "content": text}]
    messages = [{"role": "system", "content": system_prompt}] if system_prompt else []
    messages.append({"role": "user", "content": text})
    return messages
