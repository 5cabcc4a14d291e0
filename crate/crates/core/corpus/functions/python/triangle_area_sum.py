def triangle_area_sum(triangles):
    area = 0.0
    for base, height in triangles:
        if base > 0 and height > 0:
            area += base*height / 2
    result = round(area, 6)
    return result
