/** Pure key-to-action mapping; returns whether the key was handled. */
export function handleKey(key, handlers) {
    switch (key) {
        case "1":
        case "2":
        case "3":
            handlers.onCategory(Number(key));
            return true;
        case "u":
        case "U":
            handlers.onUndo();
            return true;
        case "s":
        case "S":
            handlers.onSkip();
            return true;
        case "z":
        case "Z":
            handlers.onZoom();
            return true;
        case "h":
        case "H":
        case "?":
            handlers.onHelp();
            return true;
        default:
            return false;
    }
}
const EDITABLE_TAGS = new Set(["INPUT", "TEXTAREA", "SELECT"]);
export function shouldIgnore(target) {
    const element = target;
    if (!element || typeof element.tagName !== "string")
        return false;
    return EDITABLE_TAGS.has(element.tagName) || element.isContentEditable === true;
}
/** Attach the mapping to a document; returns the unbind function. */
export function bindKeyboard(source, handlers) {
    const listener = (event) => {
        const like = event;
        if (shouldIgnore(like.target))
            return;
        if (handleKey(like.key, handlers)) {
            like.preventDefault();
        }
    };
    source.addEventListener("keydown", listener);
    return () => source.removeEventListener("keydown", listener);
}
