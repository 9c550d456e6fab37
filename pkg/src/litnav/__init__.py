"""litnav: conversational literature navigation over a knowledge graph.

The pipeline in one breath: ingest bibliographic records (corpus), draft and
refine a fielded boolean query in conversation (querylang + agent), retrieve
matching papers, build a typed knowledge graph (bkg), embed the texts
(embed), run deterministic mining tools over graph and vectors (mining), and
serve the whole loop over HTTP (service).

Everything downstream of ingestion is a pure function with total tie-break
orders, so identical inputs give byte-identical outputs.
"""

from .corpus import (
    AuthorRef,
    CorpusError,
    CorpusStore,
    IngestStats,
    MalformedJsonError,
    MetadataRecord,
    MissingFieldError,
    ScholarlyDatabaseClient,
    YearOutOfRangeError,
    get_record,
    ingest_corpus,
    load_corpus,
    normalize_name,
    parse_record,
    serialize_record,
    store_from_records,
)
from .querylang import (
    And,
    Field,
    FieldTag,
    LocalCorpusClient,
    Node,
    Not,
    Or,
    ParseError,
    Phrase,
    Word,
    YearRange,
    apply_ts_default,
    matches,
    parse_query,
    render_query,
    search,
    tokenize_text,
    validate_ast,
)
from .bkg import (
    Bkg,
    BkgEdge,
    BkgError,
    BkgNode,
    EdgeKind,
    NodeKind,
    WeightedGraph,
    build_bkg,
    citation_subgraph,
    coauthor_projection,
    dump_graph,
    graph_to_json,
    keyword_cooccurrence,
    neighbors,
)
from .embed import (
    EmbedError,
    EmbeddingProvider,
    HashingEmbedder,
    RemoteEmbedder,
    cosine,
    fnv1a64,
    knn,
    stub_embed,
)
from .mining import (
    DEFAULT_PARAMS,
    KeywordStats,
    MiningError,
    MiningParams,
    TopicModel,
    active_researchers,
    biblio_coupling,
    bridging_keywords,
    build_topic_model,
    co_citation,
    communities,
    ctfidf_terms,
    default_k,
    doc_tokens,
    fit_topics,
    keyword_stats,
    pagerank,
    pmi,
    predict_links,
    project_2d,
    recommend_similar,
    representatives,
    topic_trend,
)

__version__ = "0.1.0"
