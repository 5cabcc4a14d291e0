def running_mean(xs):
    out = []
    acc=0.0
    count = 0
    for x in xs:
        acc += x
        count += 1
        out.append(acc/count)
    return out
