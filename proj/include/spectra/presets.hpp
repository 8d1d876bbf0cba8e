// SPDX-License-Identifier: Apache-2.0
//
// spectra: named scenario presets. The escape channel is a calibrated
// two-user single-tone instance whose second user's restriction has a
// boundary local minimum and a strictly better interior one.

#pragma once

#include "spectra/channel.hpp"

namespace spectra {

/// Two-user, one-tone near-far instance with two local minima in user 2's
/// univariate restriction (oracle-verified in the acceptance suite).
/// User 1 sees almost no crosstalk; user 2's emissions hit user 1 hard.
Channel escape_channel();

} // namespace spectra
