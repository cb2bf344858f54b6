#ifndef RKM_RKM_HPP
#define RKM_RKM_HPP

#include "rkm/activations.hpp"
#include "rkm/dataset.hpp"
#include "rkm/errors.hpp"
#include "rkm/evaluation.hpp"
#include "rkm/kernels.hpp"
#include "rkm/labels.hpp"
#include "rkm/linalg.hpp"
#include "rkm/matrix.hpp"
#include "rkm/model_io.hpp"
#include "rkm/model_selection.hpp"
#include "rkm/models.hpp"
#include "rkm/random_features.hpp"
#include "rkm/reporting.hpp"
#include "rkm/rng.hpp"
#include "rkm/stat_tests.hpp"
#include "rkm/version.hpp"

#endif
