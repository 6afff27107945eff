/** Shared wire types; these mirror the annotation service payloads exactly. */
export const CATEGORY_NAMES = {
    1: "highly likely generated",
    2: "likely generated",
    3: "not generated",
};
