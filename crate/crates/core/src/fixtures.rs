//! Profiles shared by unit tests.

use crate::profile::PreferenceProfile;

/// y1≻y2≻y3, y2≻y3≻y1, y3≻y1≻y2.
pub(crate) fn paradox() -> PreferenceProfile {
    PreferenceProfile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
}

/// Two copies of y1≻y2≻y3, then y2≻y3≻y1 and y3≻y1≻y2.
pub(crate) fn four_voter() -> PreferenceProfile {
    PreferenceProfile::from_rankings(
        3,
        &[vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
    )
    .unwrap()
}

/// One labeler judging y1≻y2, y2≻y3, y3≻y1.
pub(crate) fn single_voter_cycle() -> PreferenceProfile {
    PreferenceProfile::from_comparisons(3, &[vec![(0, 1), (1, 2), (2, 0)]]).unwrap()
}
