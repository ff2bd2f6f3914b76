// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License.  You may obtain a copy
// of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  See the
// License for the specific language governing permissions and limitations
// under the License.
#include "fbe/errors.hpp"

namespace fbe {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::DegenerateFlow: return "degenerate-flow";
    case ErrorKind::InsufficientHistory: return "insufficient-history";
    case ErrorKind::UnderResolvedKernel: return "under-resolved-kernel";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::TimeStep: return "time-step";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::CorrectionFailure: return "correction-failure";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::MetricConsistency: return "metric-consistency";
    case ErrorKind::Normalization: return "normalization";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Format: return "format";
    case ErrorKind::TaylorSign: return "taylor-sign";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fbe
