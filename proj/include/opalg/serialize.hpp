#pragma once

#include <string>

#include <json.hpp>

#include "opalg/chain.hpp"
#include "opalg/embedding.hpp"
#include "opalg/generation.hpp"
#include "opalg/tensor.hpp"

namespace opalg {

using json = nlohmann::ordered_json;

/// {"rows", "cols", "backend", "entries"}; exact entries are rational strings
/// ("3/4", "1/2-5i"), floating entries [re, im] pairs.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

/// Spec (resolved dims, couplings, truncation) plus the dense idempotents.
json chain_to_json(const Chain& c);
/// Rebuilds from the stored spec and checks the stored entries match.
Chain chain_from_json(const json& j);

json generation_to_json(const GenerationCertificate& cert);
/// Header: m,r,residual,bound,passed
std::string generation_csv(const GenerationCertificate& cert);

/// Records carry a_label, commutator_upper, commutator_lower, C, K, pass.
json mbad_to_json(const MbadReport& r);

json norm_profile_to_json(const NormProfile& p);
/// Header: index,norm,bound,pass
std::string norm_profile_csv(const NormProfile& p);

json embedded_element_to_json(const EmbeddedElement& e);
json embedding_to_json(const EmbeddingReport& r);
/// Header: trial,l1_norm,sup_norm,ratio,trace_norm (trace_norm under the geometric scheme),
/// followed by trace_norm_uniform,witness_ratio.
std::string embedding_csv(const EmbeddingReport& r);

/// Round-trip decimal text for CSV cells.
std::string format_double(double v);

}  // namespace opalg
