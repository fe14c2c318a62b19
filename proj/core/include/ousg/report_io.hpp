#pragma once

#include <string>
#include <vector>

#include "ousg/gaussian.hpp"
#include "ousg/linalg.hpp"
#include "ousg/maximal.hpp"
#include "ousg/montecarlo.hpp"
#include "ousg/structure.hpp"

namespace ousg {

/// Shortest text keeping the full double value (17 significant digits).
std::string format_real(double v);

/// Parameter set from a JSON object: either {"Q": [[...]], "B": [[...]]}
/// or the rotation shorthand {"alpha": a, "R": [[...]]} meaning Q = I,
/// B = (R - I)/(2a). Unknown keys are rejected by name.
OUParams params_from_json(const std::string& text);

/// Block spec from {"theta": [...], "dim": d}; dim defaults to 2 * #theta.
BlockSpec block_spec_from_json(const std::string& text);

/// True when the JSON object carries {"theta", ...} rather than OU
/// parameters; used by the command line tool to pick the kernel flavor.
bool json_is_block_spec(const std::string& text);

/// Skew matrix from {"R": [[...]]} or a bare [[...]] array.
Matrix matrix_from_json(const std::string& text);

std::string to_json(const OUParams& p);
std::string to_json(const CanonicalForm& c);
std::string to_json(const StandardForm& f);
std::string to_json(const NormalityReport& r);
std::string to_json(const BuildingBlocks& b);
std::string to_json(const ScanResult& r);
std::string to_json(const SplitScan& s);
std::string to_json(const CertificationReport& r);
std::string to_json(const PeriodResult& r);
std::string to_json(const WeakTypeReport& r);
std::string to_json(const ProbeReport& r);
std::string to_json(const EmpiricalResult& r);
std::string to_json(const ErgodicReport& r);
std::string to_json(const PathSample& p);

/// CSV with header s,x_norm,y_norm,angle,region,kernel,bound,ratio and
/// 17 significant digits per value.
std::string to_csv(const std::vector<GridRow>& rows);

}  // namespace ousg
