#pragma once

#include "hoplab/corpus.hpp"

namespace hoplab::corpus::ref {

// Serial brute-force scanner: nested loop over (paragraph, alias) with its
// own normalization and boundary logic, independent of the Aho-Corasick path.
// This is the reference the parallel scanner is validated and benchmarked
// against; it shares only the paragraph segmentation definition.
CooccurrenceStats count_cooccurrences_naive(DocumentStream& stream,
                                            const std::vector<EntityPattern>& patterns,
                                            const std::vector<EntityPair>& pairs,
                                            const std::string& corpus_id = "corpus");

// Entities of `patterns` mentioned in `txt`, by per-alias substring search.
std::vector<std::string> match_entities_naive(const std::vector<EntityPattern>& patterns,
                                              std::string_view txt);

}  // namespace hoplab::corpus::ref
