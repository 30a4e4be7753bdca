from django import template

register = template.Library()


@register.filter
def align_cell(cell):
    """
    Pad a table cell to its column width.

    Cells are dicts with "text", "width" and "align" ("left" or "right").
    """
    if not cell:
        return ""

    text = str(cell.get("text", ""))
    width = int(cell.get("width", len(text)))
    if cell.get("align") == "right":
        return text.rjust(width)
    return text.ljust(width)


@register.simple_tag
def table_line(cells):
    """
    Join the aligned cells of one table line with two spaces.

    Trailing spaces are stripped so rendered tables diff cleanly.
    """
    return "  ".join(align_cell(cell) for cell in cells).rstrip()
