"""Published per-library values used as test oracles.

Domain scores are (Li, Se, Ma, De, Re) followed by the printed trust sum.
"""

CORE = "core-ml-framework"
LLM = "llm-inference-orchestration"
AGENT = "ai-agent-framework"

PUBLISHED_SCORES = [
    ("PyTorch", CORE, (5, 1, 3, 1, 3), 13),
    ("JAX", CORE, (5, 3, 4, 1, 1), 14),
    ("Tensorflow", CORE, (5, 1, 3, 1, 3), 13),
    ("ONNX", CORE, (5, 1, 3, 1, 1), 11),
    ("Transformers", CORE, (5, 1, 4, 1, 3), 14),
    ("TensorRT", LLM, (5, 1, 5, 1, 3), 15),
    ("LlamaIndex", LLM, (5, 1, 3, 1, 3), 13),
    ("SGLang", LLM, (5, 1, 3, 1, 1), 11),
    ("vLLM", LLM, (3, 1, 4, 1, 1), 10),
    ("LangChain", LLM, (5, 1, 1, 1, 3), 11),
    ("Text Generation Inference", LLM, (5, 1, 3, 1, 1), 11),
    ("CrewAI", AGENT, (5, 1, 3, 1, 1), 11),
    ("MetaGPT", AGENT, (5, 1, 5, 1, 1), 13),
    ("LangGraph", AGENT, (1, 1, 3, 1, 3), 9),
    ("SmolAgents", AGENT, (5, 1, 1, 1, 1), 9),
    ("Stagehand", AGENT, (5, 3, 1, 1, 1), 11),
    ("Composio", AGENT, (1, 1, 5, 1, 3), 11),
    ("Browser Use", AGENT, (5, 1, 4, 1, 3), 14),
    ("Pydantic AI", AGENT, (5, 1, 3, 1, 1), 11),
    ("Agent Development Kit", AGENT, (5, 3, 4, 1, 1), 14),
]

GROUP_TRUST_MEANS = {CORE: 13.0, LLM: 11.8, AGENT: 11.4}

# (library, category, alignment %, novelty count)
BENCHMARK_TABLE = [
    ("PyTorch", CORE, 88.2, 8),
    ("JAX", CORE, 61.1, 12),
    ("Tensorflow", CORE, 72.2, 5),
    ("ONNX", CORE, 87.5, 5),
    ("HF Transformers", CORE, 76.5, 4),
    ("TensorRT", LLM, 68.8, 5),
    ("LlamaIndex", LLM, 82.4, 7),
    ("SGLang", LLM, 73.3, 5),
    ("vLLM", LLM, 73.3, 7),
    ("LangChain", LLM, 72.2, 19),
    ("TGI", LLM, 72.2, 6),
    ("Browser Use", AGENT, 88.2, 7),
    ("CrewAI", AGENT, 71.4, 13),
    ("MetaGPT", AGENT, 57.1, 7),
    ("LangGraph", AGENT, 77.8, 7),
    ("SmolAgents", AGENT, 73.3, 9),
    ("Stagehand", AGENT, 83.3, 6),
    ("Composio", AGENT, 68.8, 5),
    ("Pydantic AI", AGENT, 88.2, 10),
    ("ADK", AGENT, 77.9, 7),
]

# printed category averages: (alignment, novelty)
PRINTED_AVERAGES = {CORE: (77.1, 6.8), LLM: (73.7, 7.8), AGENT: (76.2, 9.1)}

# matched/applicable pairs that round to the printed alignment values
ALIGNMENT_PAIRS = [
    (15, 17, 88.2),
    (11, 18, 61.1),
    (13, 18, 72.2),
    (14, 16, 87.5),
    (13, 17, 76.5),
    (11, 16, 68.8),
    (14, 17, 82.4),
    (11, 15, 73.3),
    (10, 14, 71.4),
    (4, 7, 57.1),
    (7, 9, 77.8),
    (5, 6, 83.3),
]
